#pragma once

#include <string>
#include <vector>

#include "ncihf/initialdata.hpp"
#include "ncihf/integrator.hpp"
#include "ncihf/spincm.hpp"

namespace ncihf {

// JSON text; complex numbers are [re, im], vectors are arrays of three such pairs.
std::string state_to_json(const SpinCMState& st, int indent = -1);
SpinCMState state_from_json(const std::string& text);

// {"mode", "real_mode", "reason", "message", "states": [...]}
std::string trajectory_to_json(const Trajectory& traj, int indent = -1);
std::vector<SpinCMState> trajectory_states_from_json(const std::string& text);

std::string config_to_json(const JacobiConfig& cfg, int indent = -1);
std::string config_to_json(const TravelingWaveConfig& cfg, int indent = -1);
// Throws ConfigError naming the offending key.
JacobiConfig jacobi_config_from_json(const std::string& text);
TravelingWaveConfig traveling_wave_config_from_json(const std::string& text);

}  // namespace ncihf

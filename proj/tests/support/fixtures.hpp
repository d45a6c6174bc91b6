#pragma once

#include <vector>

#include "ncihf/ansatz.hpp"
#include "ncihf/initialdata.hpp"
#include "ncihf/integrator.hpp"

namespace fixtures {

using ncihf::cplx;
using ncihf::CVec3;

// Breather evolved once per process over [0, 12] in real mode at rel_tol 1e-10, with dense output.
const ncihf::Trajectory& breather_trajectory();
double breather_period();  // detected on the cached trajectory

// One a-pole and one b-pole on the square lattice, rho = 1.
ncihf::SpinCMState traveling_wave(cplx a0 = {0.1, 1.0}, cplx b0 = {-0.3, -1.0}, cplx rho = 1.0);

double max_diff(const std::vector<CVec3>& a, const std::vector<CVec3>& b);
double max_abs(const std::vector<CVec3>& a);

// Relative error with a floor of 1 on the scale.
double rel_err(cplx a, cplx b);

}  // namespace fixtures

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ncihf/spincm.hpp"

namespace ncihf {

enum class EvolutionMode { SecondOrder, FirstOrderBacklund };
enum class Termination { TimeLimit, AdmissibilityEvent, StepFailure };

const char* to_string(EvolutionMode m);
const char* to_string(Termination t);

// Margins for the strip, separation and spin-norm conditions. A disabled check never fires.
struct EventMargins {
    bool strip = true;
    double strip_margin = 1e-6;
    bool collision = true;
    double collision_margin = 1e-6;
    bool spin_norm = true;
    double spin_margin = 1e-12;
};

struct IntegratorConfig {
    EvolutionMode mode = EvolutionMode::SecondOrder;
    bool real_mode = false;  // store the a-family only; b = a*, t = s*, real background
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.25;
    double min_step = 1e-12;
    double output_dt = 0;         // 0: one snapshot per accepted step
    bool land_on_output = false;  // clip steps so they end on output times instead of interpolating
    bool keep_dense = false;      // retain dense-output segments in the trajectory
    EventMargins events;
    cplx potential_shift = 0.0;  // constant added to wp2 in the spin equations
    bool check_admission = true;
    double admission_tol = 1e-8;
    std::size_t max_steps = 5'000'000;

    void validate() const;
};

// Flattens a state into real unknowns for a given mode and back.
class StatePacker {
public:
    StatePacker(const SpinCMState& prototype, EvolutionMode mode, bool real_mode);

    std::size_t size() const { return size_; }
    std::vector<double> pack(const SpinCMState& st) const;
    // Velocities are recomputed from the first-order map in that mode.
    SpinCMState unpack(const std::vector<double>& y, double t) const;
    void rhs(const std::vector<double>& y, double t, std::vector<double>& dy, cplx potential_shift) const;

    EvolutionMode mode() const { return mode_; }
    bool real_mode() const { return real_; }

private:
    SpinCMState proto_;
    EvolutionMode mode_;
    bool real_;
    std::size_t N_, M_, size_;
};

// Continuous extension over one accepted step.
struct DenseSegment {
    double t0 = 0, t1 = 0;
    std::vector<double> r1, r2, r3, r4, r5;
    std::vector<double> eval(double t) const;
};

struct Trajectory {
    std::vector<SpinCMState> snapshots;
    Termination reason = Termination::TimeLimit;
    std::string message;
    EvolutionMode mode = EvolutionMode::SecondOrder;
    bool real_mode = false;
    std::size_t accepted = 0, rejected = 0;
    std::vector<DenseSegment> dense;  // filled when keep_dense
    std::optional<StatePacker> packer;

    double t_begin() const;
    double t_end() const;
    // Dense-output state at time t; requires keep_dense.
    SpinCMState state_at(double t) const;
};

Trajectory integrate(const SpinCMState& state0, double t_end, const IntegratorConfig& cfg);

struct DriftReport {
    double P = 0, Q = 0, R = 0, S = 0, T = 0, S_minus_T = 0;
    double max() const;
};

DriftReport conservation_drift(const Trajectory& traj);

struct BacklundCheck {
    double max_abs = 0;
    double max_rel = 0;  // normalised by the largest |acceleration| seen
    std::size_t samples = 0;
};

// Central second differences of the sampled poles against the second-order right-hand side.
// Samples must be uniform apart from a shorter last step.
BacklundCheck backlund_consistency(const Trajectory& traj);

struct PeriodEstimate {
    double period = 0;
    double return_distance = 0;  // |X(T) - X(0)| for X = (a_j, adot_j)
};

// First return of (a_j, adot_j) to its initial value after t_min, refined on dense output.
std::optional<PeriodEstimate> detect_return_period(const Trajectory& traj, std::size_t pole, double t_min,
                                                   double tolerance = 1e-3);

// One row per snapshot: t, then Re/Im of a, adot, s, b, bdot, t, phi (see docs/schemas.md).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
std::vector<std::string> trajectory_csv_header(std::size_t N, std::size_t M);
// Reads rows written by write_trajectory_csv; parameters and rho come from the prototype.
std::vector<SpinCMState> read_trajectory_csv(std::istream& is, const SpinCMState& prototype);

}  // namespace ncihf

#pragma once

#include <optional>

#include "ncihf/integrator.hpp"

namespace ncihf {

enum class DensityPart { Total, U, V };

// max_x |eps(x, t) - eps(x, t_ref)| on an n-point grid, using dense output.
double energy_mismatch(const Trajectory& traj, double t_ref, double t, std::size_t grid_n, DensityPart part);

struct EnergyPeriod {
    double period = 0;
    double mismatch = 0;  // worse of the two reference-time mismatches at this lag
};

// Minimises energy_mismatch over lags in [lag_lo, lag_hi], measured from t_ref and from t_ref + 0.37 together:
// coarse scan, then golden section.
std::optional<EnergyPeriod> energy_return_period(const Trajectory& traj, double t_ref, double lag_lo, double lag_hi,
                                                 std::size_t grid_n = 256, DensityPart part = DensityPart::Total,
                                                 std::size_t scan = 120);

}  // namespace ncihf

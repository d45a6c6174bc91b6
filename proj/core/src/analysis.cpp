#include "ncihf/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "ncihf/ansatz.hpp"
#include "ncihf/errors.hpp"

namespace ncihf {

namespace {

std::vector<double> density(const SpinCMState& st, std::span<const double> grid, DensityPart part) {
    auto e = energy_density(st, grid);
    if (part == DensityPart::U) return e.eps_u;
    if (part == DensityPart::V) return e.eps_v;
    for (std::size_t i = 0; i < e.eps_u.size(); ++i) e.eps_u[i] += e.eps_v[i];
    return e.eps_u;
}

double mismatch(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

double energy_mismatch(const Trajectory& traj, double t_ref, double t, std::size_t grid_n, DensityPart part) {
    if (traj.snapshots.empty()) throw ConfigError("empty trajectory");
    const auto grid = periodic_grid(traj.snapshots.front().params.ell(), grid_n);
    return mismatch(density(traj.state_at(t_ref), grid, part), density(traj.state_at(t), grid, part));
}

std::optional<EnergyPeriod> energy_return_period(const Trajectory& traj, double t_ref, double lag_lo, double lag_hi,
                                                 std::size_t grid_n, DensityPart part, std::size_t scan) {
    if (traj.snapshots.empty() || traj.dense.empty()) throw ConfigError("energy period needs dense output");
    if (!(lag_lo < lag_hi) || scan < 3) throw ConfigError("empty search window");
    // A time-reversible density also matches at lag T - 2 t_ref, so a second
    // reference time is compared at the same lag to rule that coincidence out.
    constexpr double second_ref = 0.37;
    const double hi = std::min(t_ref + lag_hi, traj.t_end() - second_ref);
    const double lo = t_ref + lag_lo;
    if (!(lo < hi)) return std::nullopt;

    const auto grid = periodic_grid(traj.snapshots.front().params.ell(), grid_n);
    const auto ref = density(traj.state_at(t_ref), grid, part);
    const auto ref2 = density(traj.state_at(t_ref + second_ref), grid, part);
    auto d = [&](double t) {
        return std::max(mismatch(ref, density(traj.state_at(t), grid, part)),
                        mismatch(ref2, density(traj.state_at(t + second_ref), grid, part)));
    };

    const double step = (hi - lo) / static_cast<double>(scan - 1);
    std::size_t best = 0;
    double best_v = d(lo);
    for (std::size_t i = 1; i < scan; ++i) {
        const double v = d(lo + step * static_cast<double>(i));
        if (v < best_v) best_v = v, best = i;
    }
    // golden section on the bracket around the best sample
    double a = lo + step * (static_cast<double>(best) - 1), b = lo + step * (static_cast<double>(best) + 1);
    a = std::max(a, lo);
    b = std::min(b, hi);
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = b - g * (b - a), e = a + g * (b - a);
    double fc = d(c), fe = d(e);
    while (b - a > 1e-10) {
        if (fc < fe) {
            b = e, e = c, fe = fc;
            c = b - g * (b - a), fc = d(c);
        } else {
            a = c, c = e, fc = fe;
            e = a + g * (b - a), fe = d(e);
        }
    }
    const double t = 0.5 * (a + b);
    return EnergyPeriod{t - t_ref, d(t)};
}

}  // namespace ncihf

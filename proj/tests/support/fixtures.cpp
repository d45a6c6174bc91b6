#include "support/fixtures.hpp"

#include <algorithm>
#include <stdexcept>

namespace fixtures {

const ncihf::Trajectory& breather_trajectory() {
    static const ncihf::Trajectory traj = [] {
        ncihf::IntegratorConfig cfg;
        cfg.real_mode = true;
        cfg.keep_dense = true;
        return ncihf::integrate(ncihf::jacobi_state(ncihf::JacobiConfig::breather()), 12.0, cfg);
    }();
    return traj;
}

double breather_period() {
    static const double T = [] {
        auto pe = ncihf::detect_return_period(breather_trajectory(), 2, 1.0);
        if (!pe) throw std::runtime_error("breather period not found");
        return pe->period;
    }();
    return T;
}

ncihf::SpinCMState traveling_wave(cplx a0, cplx b0, cplx rho) {
    ncihf::TravelingWaveConfig cfg;
    cfg.a0 = {a0};
    cfg.b0 = {b0};
    cfg.rho = rho;
    return ncihf::traveling_wave_state(cfg);
}

double max_diff(const std::vector<CVec3>& a, const std::vector<CVec3>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, ncihf::max_abs(a[i] - b[i]));
    return m;
}

double max_abs(const std::vector<CVec3>& a) {
    double m = 0;
    for (const auto& v : a) m = std::max(m, ncihf::max_abs(v));
    return m;
}

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace fixtures

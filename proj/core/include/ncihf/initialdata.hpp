#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ncihf/spincm.hpp"

namespace ncihf {

using Real3 = std::array<double, 3>;

// scale * (n1 + i n2) for orthonormal n1, n2
CVec3 null_spin(const Real3& n1, const Real3& n2, cplx scale);

struct TravelingWaveConfig {
    double ell = 1.0;
    double delta = 1.0;
    cplx phi10{0.0, 0.0};
    cplx s10{1.0, 0.0};
    cplx rho{1.0, 0.0};
    Real3 n1{1.0, 0.0, 0.0};
    Real3 n2{0.0, 1.0, 0.0};
    std::vector<cplx> a0;  // a-family poles, upper strip
    std::vector<cplx> b0;  // b-family poles, lower strip
};

SpinCMState traveling_wave_state(const TravelingWaveConfig& cfg);

struct Rational {
    long num = 0;
    long den = 1;
};

struct JacobiConfig {
    int p = 1;
    int q = 1;
    double m = 0.5;
    double x0 = 0.0;
    // when set, x0 = x0_over_K * K(m) and disjointness is decided exactly
    std::optional<Rational> x0_over_K;
    double pole_guard = 1e-8;
    double phi_tol = 1e-9;  // closed-form background vs least-squares solve

    double resolved_x0() const;
    static JacobiConfig breather();
};

struct JacobiData {
    SpinCMState state;
    std::vector<cplx> alpha;     // alpha_j = a_j - i delta/2, in the state's index order
    std::vector<int> pole_set;   // 1 or 2
    double phi_solve_defect;     // |phi closed form - phi least squares|, or residual when rank deficient
    double strip_margin;
};

JacobiData jacobi_data(const JacobiConfig& cfg);
SpinCMState jacobi_state(const JacobiConfig& cfg);

// The S^2-valued curve whose pole decomposition jacobi_state encodes.
Real3 jacobi_curve(double x, const JacobiConfig& cfg);

}  // namespace ncihf

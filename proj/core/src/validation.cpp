#include "ncihf/validation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "json.hpp"
#include "ncihf/elliptic.hpp"
#include "ncihf/initialdata.hpp"
#include "ncihf/jacobi.hpp"
#include "ncihf/pde_oracle.hpp"

namespace ncihf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};
constexpr double identity_tol = 1e-10;

// Scale-aware error: identities are compared relative to the size of the terms involved.
double rel_err(cplx lhs, cplx rhs, double scale = 1.0) {
    return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs), scale});
}

class Battery {
public:
    explicit Battery(const ValidationOptions& opt)
        : opt_(opt), p_(opt.ell, opt.delta), rng_(opt.seed), ux_(-1.0, 1.0) {}

    cplx zeta2(cplx z) const { return p_.eval(z).zeta2 + opt_.perturb * z * z; }
    cplx wp2(cplx z) const { return p_.eval(z).wp2; }
    cplx wp2p(cplx z) const { return p_.eval(z).wp2p; }
    cplx f2(cplx z) const { return p_.eval(z).f2(); }
    cplx f2p(cplx z) const { return p_.eval(z).f2p(); }

    // Random point of the centred cell at least `gap` away from the lattice.
    cplx point(double gap = 0.2) {
        const double g = gap * std::min(p_.ell(), p_.delta());
        for (;;) {
            cplx z(ux_(rng_) * p_.ell(), ux_(rng_) * p_.delta());
            if (p_.lattice_distance(z) > g) return z;
        }
    }

    double in_strip(double lo, double hi) { return lo + (hi - lo) * 0.5 * (ux_(rng_) + 1.0); }

    CheckResult sweep(std::string name, double tol, const std::function<double()>& one) {
        double worst = 0;
        for (int i = 0; i < opt_.samples; ++i) worst = std::max(worst, one());
        return {std::move(name), worst, tol, worst <= tol, std::to_string(opt_.samples) + " random points"};
    }

    std::vector<CheckResult> run();

private:
    const ValidationOptions& opt_;
    EllipticParams p_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> ux_;
};

std::vector<CheckResult> Battery::run() {
    std::vector<CheckResult> out;
    const double ell = p_.ell(), delta = p_.delta();
    const cplx two_ell(2 * ell, 0), two_id(0, 2 * delta);
    const cplx add_const = 3.0 * p_.zeta_idelta() / (2.0 * I * delta);

    out.push_back({"legendre_relation", std::abs(p_.legendre_defect()), identity_tol,
                   std::abs(p_.legendre_defect()) <= identity_tol, "zeta(ell) i delta - zeta(i delta) ell = i pi/2"});

    out.push_back(sweep("zeta2_odd", identity_tol, [&] {
        const cplx z = point();
        return rel_err(zeta2(-z), -zeta2(z));
    }));
    out.push_back(sweep("wp2_even", identity_tol, [&] {
        const cplx z = point();
        return rel_err(wp2(-z), wp2(z));
    }));
    out.push_back(sweep("f2_even_f2prime_odd", identity_tol, [&] {
        const cplx z = point();
        return std::max(rel_err(f2(-z), f2(z)), rel_err(f2p(-z), -f2p(z)));
    }));
    out.push_back(sweep("zeta2_quasi_periods", identity_tol, [&] {
        const cplx z = point();
        return std::max(rel_err(zeta2(z + two_ell) - zeta2(z), pi / delta, std::abs(zeta2(z))),
                        rel_err(zeta2(z + two_id), zeta2(z)));
    }));
    out.push_back(sweep("wp2_periods", identity_tol, [&] {
        const cplx z = point();
        return std::max(rel_err(wp2(z + two_ell), wp2(z)), rel_err(wp2(z + two_id), wp2(z)));
    }));
    out.push_back(sweep("f2_quasi_periods", identity_tol, [&] {
        const cplx z = point();
        const cplx expect = f2(z) + (2 * pi / delta) * zeta2(z) + (pi / delta) * (pi / delta);
        return std::max(rel_err(f2(z + two_ell), expect), rel_err(f2(z + two_id), f2(z)));
    }));
    out.push_back(sweep("square_identity", identity_tol, [&] {
        const cplx z = point();
        const cplx zz = zeta2(z);
        return rel_err(zz * zz, wp2(z) + f2(z));
    }));
    out.push_back(sweep("addition_identity", identity_tol, [&] {
        cplx z, a, b;
        do {
            z = point();
            a = point();
            b = point();
        } while (p_.lattice_distance(z - a) < 0.2 || p_.lattice_distance(z - b) < 0.2 ||
                 p_.lattice_distance(a - b) < 0.2);
        const cplx lhs = zeta2(z - a) * zeta2(z - b);
        const cplx rhs = zeta2(a - b) * (zeta2(z - a) - zeta2(z - b)) +
                         0.5 * (f2(z - a) + f2(z - b) + f2(a - b)) + add_const;
        return rel_err(lhs, rhs);
    }));
    out.push_back(sweep("zeta2_wp2_product", identity_tol, [&] {
        const cplx z = point();
        return rel_err(zeta2(z) * wp2(z), -0.5 * (wp2p(z) + f2p(z)));
    }));
    out.push_back(sweep("wp2_is_minus_zeta2_derivative", 1e-8, [&] {
        const cplx z = point();
        const double h = 1e-5;
        return rel_err(wp2(z), -(zeta2(z + h) - zeta2(z - h)) / (2 * h));
    }));

    // Two-vector product rules. A_r(z) = (zeta2(z + i r delta/2), zeta2(z - i r delta/2)), F_r likewise with f2.
    auto pole = [&](int r) {
        return cplx(in_strip(-ell, ell), r * in_strip(0.6 * delta, 1.4 * delta));
    };
    auto pair = [&](const std::function<cplx(cplx)>& f, double x, cplx a, int r) {
        const cplx h = I * (r * delta / 2);
        return std::array<cplx, 2>{f(x - a + h), f(x - a - h)};
    };
    auto Z = [this](cplx z) { return zeta2(z); };
    auto Wm = [this](cplx z) { return -wp2(z); };  // derivative of zeta2
    auto F2 = [this](cplx z) { return f2(z); };
    out.push_back(sweep("pair_product_diagonal", identity_tol, [&] {
        const int r = ux_(rng_) < 0 ? -1 : 1;
        const double x = in_strip(-ell, ell);
        const cplx a = pole(r);
        const auto A = pair(Z, x, a, r), dA = pair(Wm, x, a, r), F = pair(F2, x, a, r);
        double e = 0;
        for (int c = 0; c < 2; ++c) e = std::max(e, rel_err(A[c] * A[c], -dA[c] + F[c]));
        return e;
    }));
    out.push_back(sweep("pair_product_mixed", identity_tol, [&] {
        const int rj = ux_(rng_) < 0 ? -1 : 1, rk = ux_(rng_) < 0 ? -1 : 1;
        const double x = in_strip(-ell, ell);
        cplx aj, ak;
        do {
            aj = pole(rj);
            ak = pole(rk);
        } while (p_.lattice_distance(aj - ak - I * (double(rj - rk) * delta / 2)) < 0.2);
        const cplx tj = aj - I * (rj * delta / 2), tk = ak - I * (rk * delta / 2);
        const auto Aj = pair(Z, x, aj, rj), Ak = pair(Z, x, ak, rk);
        const auto Fj = pair(F2, x, aj, rj), Fk = pair(F2, x, ak, rk);
        const cplx z = zeta2(tj - tk), f = f2(tj - tk);
        double e = 0;
        for (int c = 0; c < 2; ++c)
            e = std::max(e, rel_err(Aj[c] * Ak[c], z * (Aj[c] - Ak[c]) + 0.5 * (Fj[c] + Fk[c]) + 0.5 * f + add_const));
        return e;
    }));

    const double m = 0.3 + 0.4 * 0.5 * (ux_(rng_) + 1.0);
    const JacobiParams jp(m);
    out.push_back(sweep("jacobi_pythagoras", identity_tol, [&] {
        const cplx z(in_strip(-2 * jp.K, 2 * jp.K), in_strip(-0.8 * jp.Kp, 0.8 * jp.Kp));
        const auto v = jacobi_sncndn(z, m);
        return rel_err(v.sn * v.sn + v.cn * v.cn, 1.0, std::abs(v.sn * v.sn));
    }));
    out.push_back(sweep("jacobi_real_period", identity_tol, [&] {
        const cplx z(in_strip(-2 * jp.K, 2 * jp.K), in_strip(-0.8 * jp.Kp, 0.8 * jp.Kp));
        const auto v = jacobi_sncndn(z, m), w = jacobi_sncndn(z + 4 * jp.K, m);
        return std::max(rel_err(w.sn, v.sn), rel_err(w.cn, v.cn));
    }));
    {
        const double d = std::abs(ellip_K(0.5) - ellip_Kprime(0.5));
        out.push_back({"complete_integral_symmetry", d, 1e-14, d <= 1e-14, "K(1/2) = K'(1/2)"});
    }

    // Eigenrelation on the mean-free part of wp2(x - a +- i delta/2), both discretisations.
    for (auto method : {OperatorMethod::PvQuadrature, OperatorMethod::SpectralMultiplier}) {
        const OperatorEvaluator ops(p_, opt_.grid_n, method);
        const std::size_t n = ops.size();
        double worst = 0;
        for (int r : {1, -1}) {
            const cplx a = cplx(0.37 * ell, r * 1.1 * delta);
            std::vector<cplx> g1(n), g2(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double x = ops.grid()[i];
                g1[i] = -wp2(x - a + I * (r * delta / 2));
                g2[i] = -wp2(x - a - I * (r * delta / 2));
            }
            for (auto* g : {&g1, &g2}) {
                cplx mean = 0;
                for (auto v : *g) mean += v;
                mean /= static_cast<double>(n);
                for (auto& v : *g) v -= mean;
            }
            const auto T1 = ops.apply_T(std::span<const cplx>(g1)), T2 = ops.apply_T(std::span<const cplx>(g2));
            const auto S1 = ops.apply_Ttilde(std::span<const cplx>(g1)), S2 = ops.apply_Ttilde(std::span<const cplx>(g2));
            for (std::size_t i = 0; i < n; ++i) {
                worst = std::max(worst, std::abs(T1[i] - S2[i] + I * double(r) * g1[i]));
                worst = std::max(worst, std::abs(S1[i] - T2[i] + I * double(r) * g2[i]));
            }
        }
        out.push_back({std::string("operator_eigenrelation_") + to_string(method), worst, 1e-8, worst <= 1e-8,
                       "grid " + std::to_string(n)});
    }

    {
        auto st = jacobi_state(JacobiConfig::breather());
        if (opt_.perturb != 0) st.s[0][0] += opt_.perturb;
        const auto rep = constraint_residuals(st);
        const bool ok = rep.passes(1e-9);
        out.push_back({"breather_constraints", rep.max_residual(), 1e-9, ok, "null, orthogonality, balance, background"});
    }
    return out;
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& opt) { return Battery(opt).run(); }

std::string validation_report_json(const std::vector<CheckResult>& checks, int indent) {
    nlohmann::json arr = nlohmann::json::array();
    bool all = true;
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass},
                       {"detail", c.detail}});
        all = all && c.pass;
    }
    nlohmann::json j{{"checks", arr}, {"count", checks.size()}, {"all_pass", all}};
    return j.dump(indent);
}

}  // namespace ncihf

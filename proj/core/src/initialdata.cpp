#include "ncihf/initialdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ncihf/errors.hpp"
#include "ncihf/jacobi.hpp"

namespace ncihf {

namespace {

constexpr cplx I{0.0, 1.0};

CVec3 to_c(const Real3& v) { return {v[0], v[1], v[2]}; }

double rdot(const Real3& a, const Real3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void require_admissible(const SpinCMState& st, const char* who) {
    auto rep = constraint_residuals(st);
    if (!(rep.strip_margin > 0)) throw ConfigError(std::string(who) + ": poles outside the admissible strips");
    if (!(rep.min_separation > st.params.pole_guard()))
        throw ConfigError(std::string(who) + ": poles coincide modulo the lattice");
}

// Solve the 3x3 system G x = h by Gaussian elimination with partial pivoting.
// Returns false when the matrix is numerically singular.
bool solve3(std::array<std::array<cplx, 3>, 3> G, std::array<cplx, 3> h, std::array<cplx, 3>& x) {
    double scale = 0;
    for (auto& row : G)
        for (auto v : row) scale = std::max(scale, std::abs(v));
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(G[r][c]) > std::abs(G[piv][c])) piv = r;
        if (std::abs(G[piv][c]) < 1e-10 * scale) return false;
        std::swap(G[c], G[piv]);
        std::swap(h[c], h[piv]);
        for (int r = c + 1; r < 3; ++r) {
            cplx f = G[r][c] / G[c][c];
            for (int k = c; k < 3; ++k) G[r][k] -= f * G[c][k];
            h[r] -= f * h[c];
        }
    }
    for (int r = 2; r >= 0; --r) {
        cplx acc = h[r];
        for (int k = r + 1; k < 3; ++k) acc -= G[r][k] * x[k];
        x[r] = acc / G[r][r];
    }
    return true;
}

long long mod_pos(long long a, long long m) { return ((a % m) + m) % m; }

}  // namespace

CVec3 null_spin(const Real3& n1, const Real3& n2, cplx scale) {
    constexpr double tol = 1e-12;
    if (std::abs(rdot(n1, n1) - 1) > tol || std::abs(rdot(n2, n2) - 1) > tol || std::abs(rdot(n1, n2)) > tol)
        throw ConfigError("null_spin: n1 and n2 must be orthonormal");
    return scale * (to_c(n1) + I * to_c(n2));
}

SpinCMState traveling_wave_state(const TravelingWaveConfig& cfg) {
    if (cfg.a0.empty() || cfg.a0.size() != cfg.b0.size())
        throw ConfigError("traveling wave: need the same non-zero number of a and b poles");
    if (cfg.s10 == 0.0) throw ConfigError("traveling wave: spin amplitude must be non-zero");
    SpinCMState st(EllipticParams(cfg.ell, cfg.delta));
    const CVec3 s = null_spin(cfg.n1, cfg.n2, cfg.s10);
    const CVec3 n3 = cross(to_c(cfg.n1), to_c(cfg.n2));
    st.rho = cfg.rho;
    st.phi = cfg.phi10 * (to_c(cfg.n1) + I * to_c(cfg.n2)) + cfg.rho * n3;
    st.a = cfg.a0;
    st.b = cfg.b0;
    st.s.assign(st.a.size(), s);
    st.t.assign(st.b.size(), s);
    st.adot.assign(st.a.size(), 0.0);
    st.bdot.assign(st.b.size(), 0.0);
    require_admissible(st, "traveling wave");
    auto v = backlund_velocity(st);
    st.adot = v.a;
    st.bdot = v.b;
    return st;
}

double JacobiConfig::resolved_x0() const {
    if (x0_over_K) return static_cast<double>(x0_over_K->num) / static_cast<double>(x0_over_K->den) * ellip_K(m);
    return x0;
}

JacobiConfig JacobiConfig::breather() {
    JacobiConfig c;
    c.p = 1;
    c.q = 1;
    c.m = 0.5;
    c.x0_over_K = Rational{1, 1};
    c.x0 = c.resolved_x0();
    return c;
}

Real3 jacobi_curve(double x, const JacobiConfig& cfg) {
    const double x0 = cfg.resolved_x0();
    auto a = jacobi_sncndn(cfg.p * x, cfg.m);
    auto b = jacobi_sncndn(cfg.q * (x - x0), cfg.m);
    return {a.sn * b.cn, a.sn * b.sn, a.cn};
}

JacobiData jacobi_data(const JacobiConfig& cfg) {
    if (cfg.p < 1 || cfg.q < 1) throw ConfigError("jacobi: p and q must be positive integers");
    if (cfg.x0_over_K && cfg.x0_over_K->den <= 0) throw ConfigError("jacobi: x0/K denominator must be positive");
    const JacobiParams jp(cfg.m);
    const double K = jp.K, Kp = jp.Kp;
    const double x0 = cfg.resolved_x0();
    if (!(x0 > 0 && x0 < 4 * K)) throw ConfigError("jacobi: x0 must lie in (0, 4K(m))");
    const int p = cfg.p, q = cfg.q;
    const double rm = std::sqrt(cfg.m);

    SpinCMState st(EllipticParams::Builder().ell(2 * K).delta(2 * Kp).pole_guard(cfg.pole_guard).build());
    const auto& par = st.params;
    const std::size_t N = static_cast<std::size_t>(2 * (p * p + q * q));
    std::vector<cplx> alpha(N);
    std::vector<int> set(N, 0);
    std::vector<CVec3> spin(N);
    auto xi = [&](int j, int k) { return cplx(2.0 * j * K, (2.0 * k + 1.0) * Kp); };
    auto sign = [](int j) { return (j % 2 == 0) ? 1.0 : -1.0; };

    // the two pole sets must be disjoint
    for (int j1 = 0; j1 < 2 * p; ++j1)
        for (int k1 = 0; k1 < p; ++k1)
            for (int j2 = 0; j2 < 2 * q; ++j2)
                for (int k2 = 0; k2 < q; ++k2) {
                    bool same;
                    if (cfg.x0_over_K) {
                        const long long num = cfg.x0_over_K->num, den = cfg.x0_over_K->den;
                        bool im_eq = (2LL * k1 + 1) * q == (2LL * k2 + 1) * p;
                        // real parts in units of K, compared modulo 4K
                        long long diff = 2LL * j1 * q * den - 2LL * j2 * p * den - num * p * q;
                        same = im_eq && mod_pos(diff, 4LL * p * q * den) == 0;
                    } else {
                        cplx d = xi(j1, k1) / static_cast<double>(p) - xi(j2, k2) / static_cast<double>(q) - x0;
                        same = par.lattice_distance(d) < 1e-12 * std::max(1.0, 2 * K);
                    }
                    if (same) {
                        std::ostringstream os;
                        os << "jacobi: pole sets intersect (set-1 index (" << j1 << "," << k1 << "), set-2 index ("
                           << j2 << "," << k2 << "))";
                        throw ConfigError(os.str());
                    }
                }
    for (int j = 0; j < 2 * p; ++j)
        for (int k = 0; k < p; ++k) {
            auto idx = static_cast<std::size_t>(j * p + k);
            cplx al = xi(j, k) / static_cast<double>(p);
            auto jf = jacobi_sncndn(static_cast<double>(q) * (al - x0), cfg.m, cfg.pole_guard);
            cplx pref = -I * sign(j) / (p * rm);
            alpha[idx] = al;
            set[idx] = 1;
            spin[idx] = pref * CVec3(jf.cn, jf.sn, -I * sign(k));
        }
    for (int j = 0; j < 2 * q; ++j)
        for (int k = 0; k < q; ++k) {
            auto idx = static_cast<std::size_t>(2 * p * p + j * q + k);
            cplx al = xi(j, k) / static_cast<double>(q) + x0;
            cplx sn = jacobi_sncndn(static_cast<double>(p) * al, cfg.m, cfg.pole_guard).sn;
            cplx pref = -I * sign(j) / (q * rm);
            alpha[idx] = al;
            set[idx] = 2;
            spin[idx] = pref * CVec3(-I * sign(k) * sn, sn, 0.0);
        }
    for (std::size_t i = 0; i < N; ++i)
        if (set[i] == 0) throw ConfigError("jacobi: pole index map does not cover every index");

    for (cplx al : alpha)
        if (par.lattice_distance(al) < cfg.pole_guard) throw ConfigError("jacobi: a pole coincides with the lattice");

    const cplx half = I * (par.delta() / 2);
    st.rho = 1.0;
    st.a.resize(N);
    st.b.resize(N);
    st.s = spin;
    st.t.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        st.a[i] = alpha[i] + half;
        st.b[i] = std::conj(st.a[i]);
        st.t[i] = conj(spin[i]);
    }
    st.adot.assign(N, 0.0);
    st.bdot.assign(N, 0.0);

    // closed-form background: (0,0,1) + sum i s_j zeta2(alpha_j) + c.c.
    CVec3 acc;
    for (std::size_t i = 0; i < N; ++i) acc += I * spin[i] * par.eval(alpha[i]).zeta2;
    st.phi = CVec3(0.0, 0.0, 1.0);
    for (int c = 0; c < 3; ++c) st.phi[c] += 2.0 * acc[c].real();

    // independent path: least-squares solve of s_j . (i phi + rest_j) = 0 over both families
    SpinCMState probe = st;
    probe.phi = CVec3();
    auto rest = backlund_vectors(probe);
    std::array<std::array<cplx, 3>, 3> G{};
    std::array<cplx, 3> h{};
    auto add_row = [&](const CVec3& sp, const CVec3& r) {
        CVec3 row = I * sp;
        cplx rhs = -dot(sp, r);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) G[a][b] += std::conj(row[a]) * row[b];
            h[a] += std::conj(row[a]) * rhs;
        }
    };
    for (std::size_t i = 0; i < N; ++i) {
        add_row(st.s[i], rest.a[i]);
        add_row(st.t[i], rest.b[i]);
    }
    std::array<cplx, 3> phi_ls{};
    double defect;
    if (solve3(G, h, phi_ls)) {
        defect = 0;
        for (int c = 0; c < 3; ++c) defect = std::max(defect, std::abs(phi_ls[c] - st.phi[c]));
    } else {
        defect = constraint_residuals(st).orthogonality;
    }
    if (!(defect <= cfg.phi_tol)) {
        std::ostringstream os;
        os << "jacobi: closed-form background disagrees with the constraint solve by " << defect;
        throw ConfigError(os.str());
    }

    auto v = backlund_velocity(st);
    st.adot = v.a;
    st.bdot = v.b;
    double margin = constraint_residuals(st).strip_margin;
    return {std::move(st), std::move(alpha), std::move(set), defect, margin};
}

SpinCMState jacobi_state(const JacobiConfig& cfg) { return jacobi_data(cfg).state; }

}  // namespace ncihf

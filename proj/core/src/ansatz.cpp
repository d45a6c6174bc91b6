#include "ncihf/ansatz.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "ncihf/errors.hpp"

namespace ncihf {

namespace {

constexpr cplx I{0.0, 1.0};

void require_strip(const SpinCMState& st) {
    st.validate_shapes();
    const double d = st.params.delta();
    for (cplx a : st.a)
        if (!(a.imag() > d / 2 && a.imag() < 1.5 * d)) throw InadmissibleState("a-pole outside the upper strip");
    for (cplx b : st.b)
        if (!(b.imag() > -1.5 * d && b.imag() < -d / 2)) throw InadmissibleState("b-pole outside the lower strip");
}

}  // namespace

std::vector<double> periodic_grid(double ell, std::size_t n) {
    if (n == 0) throw ConfigError("grid needs at least one point");
    std::vector<double> x(n);
    const double h = 2 * ell / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = -ell + h * static_cast<double>(i);
    return x;
}

FieldSample eval_field(const SpinCMState& st, std::span<const double> grid) {
    require_strip(st);
    const auto& p = st.params;
    const cplx half = I * (p.delta() / 2);
    FieldSample f;
    f.x.assign(grid.begin(), grid.end());
    f.u.assign(grid.size(), st.phi);
    f.v.assign(grid.size(), st.phi);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        CVec3 du, dv;
        for (std::size_t j = 0; j < st.N(); ++j) {
            du += st.s[j] * p.eval(x - st.a[j] + half).zeta2;
            dv += st.s[j] * p.eval(x - st.a[j] - half).zeta2;
        }
        for (std::size_t k = 0; k < st.M(); ++k) {
            du -= st.t[k] * p.eval(x - st.b[k] - half).zeta2;
            dv -= st.t[k] * p.eval(x - st.b[k] + half).zeta2;
        }
        f.u[i] += I * du;
        f.v[i] += I * dv;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f.u2.push_back(dot(f.u[i], f.u[i]));
        f.v2.push_back(dot(f.v[i], f.v[i]));
    }
    return f;
}

FieldPair eval_x_derivative(const SpinCMState& st, std::span<const double> grid) {
    require_strip(st);
    const auto& p = st.params;
    const cplx half = I * (p.delta() / 2);
    FieldPair out{std::vector<CVec3>(grid.size()), std::vector<CVec3>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        CVec3 du, dv;
        for (std::size_t j = 0; j < st.N(); ++j) {
            du -= st.s[j] * p.eval(x - st.a[j] + half).wp2;
            dv -= st.s[j] * p.eval(x - st.a[j] - half).wp2;
        }
        for (std::size_t k = 0; k < st.M(); ++k) {
            du += st.t[k] * p.eval(x - st.b[k] - half).wp2;
            dv += st.t[k] * p.eval(x - st.b[k] + half).wp2;
        }
        out.u[i] = I * du;
        out.v[i] = I * dv;
    }
    return out;
}

FieldPair eval_time_derivative(const SpinCMState& st, std::span<const double> grid) {
    require_strip(st);
    const auto& p = st.params;
    const cplx half = I * (p.delta() / 2);
    const auto rates = spin_rhs(st);
    const CVec3 phidot = phi_rhs(st);
    FieldPair out{std::vector<CVec3>(grid.size(), phidot), std::vector<CVec3>(grid.size(), phidot)};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        CVec3 du, dv;
        for (std::size_t j = 0; j < st.N(); ++j) {
            auto eu = p.eval(x - st.a[j] + half), ev = p.eval(x - st.a[j] - half);
            du += rates.s[j] * eu.zeta2 + st.s[j] * (st.adot[j] * eu.wp2);
            dv += rates.s[j] * ev.zeta2 + st.s[j] * (st.adot[j] * ev.wp2);
        }
        for (std::size_t k = 0; k < st.M(); ++k) {
            auto eu = p.eval(x - st.b[k] - half), ev = p.eval(x - st.b[k] + half);
            du -= rates.t[k] * eu.zeta2 + st.t[k] * (st.bdot[k] * eu.wp2);
            dv -= rates.t[k] * ev.zeta2 + st.t[k] * (st.bdot[k] * ev.wp2);
        }
        out.u[i] += I * du;
        out.v[i] += I * dv;
    }
    return out;
}

CVec3 frame_rotation_rate(const SpinCMState& st) {
    CVec3 total;
    for (const auto& s : st.s) total = total + s;
    for (const auto& t : st.t) total = total + t;
    return (std::numbers::pi / (2 * st.params.ell() * st.params.delta())) * total;
}

EnergyDensity energy_density(const SpinCMState& st, std::span<const double> grid, double reduction_tol) {
    require_strip(st);
    if (!(real_reduction_defect(st) <= reduction_tol))
        throw DomainError("energy density needs a real-reduction state (b = a*, t = s*, real background)");
    const auto& p = st.params;
    const cplx shift = I * p.delta();
    const cplx half = I * (p.delta() / 2);
    const std::size_t N = st.N();
    std::vector<cplx> w(N);
    cplx c = 0;
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < N; ++k) {
            const cplx ss = dot(st.s[j], conj(st.s[k]));
            const auto e = p.eval(st.a[j] - std::conj(st.a[k]) + shift);
            w[j] += ss * e.wp2;
            c += 0.5 * ss * e.f2p();
        }
    // The pole closed form omits the constant-mode response of the operators; adding it back
    // makes the densities agree with -u.(T u_x - Tt v_x)/2 and -v.(T v_x - Tt u_x)/2.
    const CVec3 wr = frame_rotation_rate(st);
    const auto field = eval_field(st, grid);
    EnergyDensity out;
    std::size_t i = 0;
    for (double x : grid) {
        cplx su = c, sv = c;
        for (std::size_t j = 0; j < N; ++j) {
            su += w[j] * p.eval(x - st.a[j] + half).zeta2;
            sv += w[j] * p.eval(x - st.a[j] - half).zeta2;
        }
        out.eps_u.push_back(-2.0 * su.imag() + 0.5 * dot(field.u[i], wr).real());
        out.eps_v.push_back(2.0 * sv.imag() - 0.5 * dot(field.v[i], wr).real());
        ++i;
    }
    if (!grid.empty()) {
        const double h = 2 * p.ell() / static_cast<double>(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) out.H += h * (out.eps_u[i] + out.eps_v[i]);
    }
    return out;
}

void write_field_csv(std::ostream& os, const FieldSample& f) {
    os << "x";
    for (const char* name : {"u", "v"})
        for (int c = 1; c <= 3; ++c) os << ',' << name << c << "_re," << name << c << "_im";
    os << ",u2_abs,eps_u,eps_v\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < f.x.size(); ++i) {
        os << f.x[i];
        for (const auto* field : {&f.u, &f.v})
            for (int c = 0; c < 3; ++c) os << ',' << (*field)[i][c].real() << ',' << (*field)[i][c].imag();
        os << ',' << std::abs(f.u2[i]);
        os << ',' << (f.eps_u.empty() ? std::nan("") : f.eps_u[i]) << ',' << (f.eps_v.empty() ? std::nan("") : f.eps_v[i]) << '\n';
    }
}

}  // namespace ncihf

#include "ncihf/spincm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ncihf/errors.hpp"

namespace ncihf {

namespace {

constexpr cplx I{0.0, 1.0};

Zeta2Values pair_eval(const EllipticParams& p, cplx z, const char* what, std::size_t j, std::size_t k) {
    if (p.lattice_distance(z) < p.pole_guard()) {
        std::ostringstream os;
        os << what << " collision between indices " << j << " and " << k;
        throw CollisionError(os.str());
    }
    return p.eval(z);
}

cplx mixed_shift(const EllipticParams& p) { return {0.0, p.delta()}; }

}  // namespace

void SpinCMState::validate_shapes() const {
    if (adot.size() != a.size() || s.size() != a.size())
        throw ConfigError("a-family arrays (a, adot, s) have different lengths");
    if (bdot.size() != b.size() || t.size() != b.size())
        throw ConfigError("b-family arrays (b, bdot, t) have different lengths");
}

FamilyPair accel(const SpinCMState& st) {
    st.validate_shapes();
    const auto& p = st.params;
    FamilyPair out{std::vector<cplx>(st.N()), std::vector<cplx>(st.M())};
    for (std::size_t j = 0; j < st.N(); ++j)
        for (std::size_t k = j + 1; k < st.N(); ++k) {
            cplx w = dot(st.s[j], st.s[k]) * pair_eval(p, st.a[j] - st.a[k], "a-pole", j, k).wp2p;
            out.a[j] -= 2.0 * w;
            out.a[k] += 2.0 * w;
        }
    for (std::size_t j = 0; j < st.M(); ++j)
        for (std::size_t k = j + 1; k < st.M(); ++k) {
            cplx w = dot(st.t[j], st.t[k]) * pair_eval(p, st.b[j] - st.b[k], "b-pole", j, k).wp2p;
            out.b[j] -= 2.0 * w;
            out.b[k] += 2.0 * w;
        }
    return out;
}

SpinRates spin_rhs(const SpinCMState& st, cplx potential_shift) {
    st.validate_shapes();
    const auto& p = st.params;
    SpinRates out{std::vector<CVec3>(st.N()), std::vector<CVec3>(st.M())};
    for (std::size_t j = 0; j < st.N(); ++j)
        for (std::size_t k = j + 1; k < st.N(); ++k) {
            cplx pot = pair_eval(p, st.a[j] - st.a[k], "a-pole", j, k).wp2 + potential_shift;
            CVec3 w = cross(st.s[j], st.s[k]) * pot;
            out.s[j] -= 2.0 * w;
            out.s[k] += 2.0 * w;
        }
    for (std::size_t j = 0; j < st.M(); ++j)
        for (std::size_t k = j + 1; k < st.M(); ++k) {
            cplx pot = pair_eval(p, st.b[j] - st.b[k], "b-pole", j, k).wp2 + potential_shift;
            CVec3 w = cross(st.t[j], st.t[k]) * pot;
            out.t[j] -= 2.0 * w;
            out.t[k] += 2.0 * w;
        }
    return out;
}

CVec3 phi_rhs(const SpinCMState& st) {
    st.validate_shapes();
    const auto& p = st.params;
    CVec3 out;
    for (std::size_t j = 0; j < st.N(); ++j)
        for (std::size_t k = j + 1; k < st.N(); ++k)
            out += cross(st.s[j], st.s[k]) * (I * pair_eval(p, st.a[j] - st.a[k], "a-pole", j, k).f2p());
    for (std::size_t j = 0; j < st.M(); ++j)
        for (std::size_t k = j + 1; k < st.M(); ++k)
            out -= cross(st.t[j], st.t[k]) * (I * pair_eval(p, st.b[j] - st.b[k], "b-pole", j, k).f2p());
    return out;
}

BacklundVectors backlund_vectors(const SpinCMState& st) {
    st.validate_shapes();
    const auto& p = st.params;
    const CVec3 iphi = I * st.phi;
    BacklundVectors out{std::vector<CVec3>(st.N(), iphi), std::vector<CVec3>(st.M(), iphi)};
    for (std::size_t j = 0; j < st.N(); ++j)
        for (std::size_t k = j + 1; k < st.N(); ++k) {
            cplx z = pair_eval(p, st.a[j] - st.a[k], "a-pole", j, k).zeta2;
            out.a[j] -= st.s[k] * z;
            out.a[k] += st.s[j] * z;
        }
    for (std::size_t j = 0; j < st.M(); ++j)
        for (std::size_t k = j + 1; k < st.M(); ++k) {
            cplx z = pair_eval(p, st.b[j] - st.b[k], "b-pole", j, k).zeta2;
            out.b[j] += st.t[k] * z;
            out.b[k] -= st.t[j] * z;
        }
    const cplx shift = mixed_shift(p);
    for (std::size_t j = 0; j < st.N(); ++j)
        for (std::size_t k = 0; k < st.M(); ++k) {
            out.a[j] += st.t[k] * pair_eval(p, st.a[j] - st.b[k] + shift, "mixed", j, k).zeta2;
            out.b[k] -= st.s[j] * pair_eval(p, st.b[k] - st.a[j] + shift, "mixed", j, k).zeta2;
        }
    return out;
}

FamilyPair backlund_velocity(const SpinCMState& st) {
    auto vecs = backlund_vectors(st);
    FamilyPair out{std::vector<cplx>(st.N()), std::vector<cplx>(st.M())};
    auto solve = [](const CVec3& spin, const CVec3& v, std::size_t j) {
        double n2 = herm_norm2(spin);
        if (!(n2 > 0.0)) {
            std::ostringstream os;
            os << "spin " << j << " vanishes";
            throw ZeroSpinError(os.str());
        }
        return dot(conj(spin), cross(spin, v)) / n2;
    };
    for (std::size_t j = 0; j < st.N(); ++j) out.a[j] = -solve(st.s[j], vecs.a[j], j);
    for (std::size_t k = 0; k < st.M(); ++k) out.b[k] = solve(st.t[k], vecs.b[k], st.N() + k);
    return out;
}

double ConstraintReport::max_residual() const {
    return std::max({null_spin, orthogonality, spin_balance, background});
}

bool ConstraintReport::passes(double tol) const {
    return max_residual() <= tol && strip_margin > 0 && min_separation > 0 && min_spin_norm > 0;
}

ConservedQuantities conserved_quantities(const SpinCMState& st) {
    st.validate_shapes();
    const auto& p = st.params;
    ConservedQuantities out;
    for (const auto& s : st.s) out.P.push_back(dot(s, s));
    for (const auto& t : st.t) out.P.push_back(dot(t, t));

    auto vecs = backlund_vectors(st);
    for (std::size_t j = 0; j < st.N(); ++j) out.Q.push_back(dot(st.s[j], vecs.a[j]));
    for (std::size_t k = 0; k < st.M(); ++k) out.Q.push_back(dot(st.t[k], vecs.b[k]));

    cplx R = dot(st.phi, st.phi);
    for (std::size_t j = 0; j < st.N(); ++j)
        for (std::size_t k = j + 1; k < st.N(); ++k)
            R -= dot(st.s[j], st.s[k]) * pair_eval(p, st.a[j] - st.a[k], "a-pole", j, k).f2();
    for (std::size_t j = 0; j < st.M(); ++j)
        for (std::size_t k = j + 1; k < st.M(); ++k)
            R -= dot(st.t[j], st.t[k]) * pair_eval(p, st.b[j] - st.b[k], "b-pole", j, k).f2();
    const cplx shift = mixed_shift(p);
    for (std::size_t j = 0; j < st.N(); ++j)
        for (std::size_t k = 0; k < st.M(); ++k)
            R += dot(st.s[j], st.t[k]) * pair_eval(p, st.a[j] - st.b[k] + shift, "mixed", j, k).f2();
    out.R = R;
    for (const auto& s : st.s) out.S += s;
    for (const auto& t : st.t) out.T += t;
    return out;
}

ConstraintReport constraint_residuals(const SpinCMState& st) {
    const auto& p = st.params;
    ConstraintReport r;
    constexpr double inf = std::numeric_limits<double>::infinity();
    r.strip_margin = inf;
    r.min_separation = inf;
    r.min_spin_norm = inf;
    const double d = p.delta();
    for (cplx a : st.a) r.strip_margin = std::min({r.strip_margin, a.imag() - d / 2, 1.5 * d - a.imag()});
    for (cplx b : st.b) r.strip_margin = std::min({r.strip_margin, b.imag() + 1.5 * d, -d / 2 - b.imag()});
    for (std::size_t j = 0; j < st.N(); ++j)
        for (std::size_t k = j + 1; k < st.N(); ++k)
            r.min_separation = std::min(r.min_separation, p.lattice_distance(st.a[j] - st.a[k]));
    for (std::size_t j = 0; j < st.M(); ++j)
        for (std::size_t k = j + 1; k < st.M(); ++k)
            r.min_separation = std::min(r.min_separation, p.lattice_distance(st.b[j] - st.b[k]));
    for (cplx a : st.a)
        for (cplx b : st.b) r.min_separation = std::min(r.min_separation, p.lattice_distance(a - b + mixed_shift(p)));
    for (const auto& s : st.s) r.min_spin_norm = std::min(r.min_spin_norm, herm_norm2(s));
    for (const auto& t : st.t) r.min_spin_norm = std::min(r.min_spin_norm, herm_norm2(t));

    auto cq = conserved_quantities(st);
    for (cplx P : cq.P) r.null_spin = std::max(r.null_spin, std::abs(P));
    for (cplx Q : cq.Q) r.orthogonality = std::max(r.orthogonality, std::abs(Q));
    r.spin_balance = max_abs(cq.S - cq.T);
    r.background = std::abs(cq.R - st.rho * st.rho);
    return r;
}

CMat3 frame_rotation(const CVec3& S, cplx c, double t) {
    const cplx theta = 2.0 * c * t;
    const cplx x2 = theta * theta * dot(S, S);
    cplx sinc, cosc;  // sin(x)/x and (1 - cos x)/x^2, both even in x
    if (std::abs(x2) < 1e-8) {
        sinc = 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
        cosc = 0.5 - x2 / 24.0 + x2 * x2 / 720.0;
    } else {
        const cplx x = std::sqrt(x2);  // branch immaterial
        sinc = std::sin(x) / x;
        cosc = (1.0 - std::cos(x)) / x2;
    }
    const CMat3 K = cross_matrix(S);
    return CMat3::identity() + (theta * sinc) * K + (theta * theta * cosc) * (K * K);
}

SpinCMState rotate_frame(const SpinCMState& st, cplx c, double t) {
    SpinCMState out = st;
    CVec3 S, T;
    for (const auto& s : st.s) S += s;
    for (const auto& v : st.t) T += v;
    const CMat3 Ra = frame_rotation(S, c, t), Rb = frame_rotation(T, c, t);
    for (auto& s : out.s) s = Ra * s;
    for (auto& v : out.t) v = Rb * v;
    return out;
}

double real_reduction_defect(const SpinCMState& st) {
    if (st.N() != st.M()) return std::numeric_limits<double>::infinity();
    double d = 0;
    for (std::size_t j = 0; j < st.N(); ++j) {
        d = std::max(d, std::abs(st.b[j] - std::conj(st.a[j])));
        d = std::max(d, max_abs(st.t[j] - conj(st.s[j])));
    }
    for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(st.phi[i].imag()));
    return d;
}

}  // namespace ncihf

#include "ncihf/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ncihf/errors.hpp"

namespace ncihf {

namespace {
constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};
// exp(40) ~ 2e17: terms below q^n with n*log(1/q) > 40 are invisible in double
constexpr double kSeriesDepth = 40.0;
// keep sin/cos of the reduced argument finite
constexpr double kMaxRatio = 400.0;
}  // namespace

EllipticParams EllipticParams::Builder::build() const {
    return EllipticParams(ell_, delta_, guard_, legendre_tol_);
}

EllipticParams::EllipticParams(double ell, double delta, double pole_guard, double legendre_tol)
    : ell_(ell), delta_(delta), guard_(pole_guard) {
    if (!(ell > 0) || !(delta > 0) || !std::isfinite(ell) || !std::isfinite(delta))
        throw DomainError("half-periods must be positive and finite");
    if (!(pole_guard >= 0)) throw DomainError("pole guard must be non-negative");
    if (std::max(ell / delta, delta / ell) > kMaxRatio)
        throw DomainError("half-period ratio too extreme for double-precision series");

    // pick the orientation whose nome is at most exp(-pi)
    rotated_ = ell > delta;
    w_ = rotated_ ? delta : ell;
    wprime_ = rotated_ ? ell : delta;
    logq_ = -pi * wprime_ / w_;
    q_ = std::exp(logq_);
    nterms_ = std::min(kMaxTerms, static_cast<int>(std::ceil(kSeriesDepth / -logq_)) + 2);

    double sum = 0;
    for (int n = 1; n <= nterms_; ++n) {
        double q2n = std::exp(2.0 * n * logq_);
        inv1mq2n_[static_cast<std::size_t>(n)] = 1.0 / (1.0 - q2n);
        sum += n * q2n / (1.0 - q2n);
    }
    eta_int_ = pi * pi / (12.0 * w_) * (1.0 - 24.0 * sum);
    cplx eta_int_prime = raw_internal(cplx(0.0, wprime_)).zeta;

    if (!rotated_) {
        eta1_ = eta_int_;
        eta3_ = eta_int_prime;
    } else {
        // zeta_ext(z) = -i zeta_int(-i z); zeta_int is odd
        eta1_ = I * eta_int_prime;
        eta3_ = -I * eta_int_;
    }
    c1_ = eta1_ / ell_;
    c2_ = eta3_ / (I * delta_);

    cplx lhs = eta1_ * (I * delta_) - eta3_ * ell_;
    double scale = std::max({1.0, std::abs(eta1_ * delta_), std::abs(eta3_ * ell_)});
    legendre_defect_ = std::abs(lhs - I * (pi / 2)) / scale;
    if (legendre_defect_ > legendre_tol) {
        std::ostringstream os;
        os << "quasi-period constants fail the Legendre relation (defect " << legendre_defect_ << ")";
        throw DomainError(os.str());
    }
}

EllipticParams::Reduced EllipticParams::reduce(cplx z) const {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("non-finite argument");
    long n = std::lround(z.real() / (2 * ell_));
    long m = std::lround(z.imag() / (2 * delta_));
    cplx z0 = z - cplx(2.0 * n * ell_, 2.0 * m * delta_);
    if (std::abs(z0) < guard_) {
        std::ostringstream os;
        os << "argument " << z << " within pole guard of the lattice";
        throw PoleError(os.str());
    }
    return {z0, n, m};
}

double EllipticParams::lattice_distance(cplx z) const {
    long n = std::lround(z.real() / (2 * ell_));
    long m = std::lround(z.imag() / (2 * delta_));
    return std::abs(z - cplx(2.0 * n * ell_, 2.0 * m * delta_));
}

EllipticParams::Raw EllipticParams::raw_internal(cplx zi) const {
    const double k = pi / (2 * w_);
    const cplx v = k * zi;
    const cplx sv = std::sin(v), cv = std::cos(v);
    const cplx cot = cv / sv;
    const cplx csc2 = 1.0 / (sv * sv);

    // q^{2n} e^{+-2inv} = A^n, B^n with |A|,|B| <= q inside the cell
    const cplx A = std::exp(2.0 * logq_ + 2.0 * I * v);
    const cplx B = std::exp(2.0 * logq_ - 2.0 * I * v);
    cplx An = 1.0, Bn = 1.0;
    cplx s0 = 0, s1 = 0, s2 = 0;  // sum c_n sin, n c_n cos, n^2 c_n sin
    for (int n = 1; n <= nterms_; ++n) {
        An *= A;
        Bn *= B;
        const double g = inv1mq2n_[static_cast<std::size_t>(n)];
        const cplx sn = (An - Bn) * g / (2.0 * I);
        const cplx cn = (An + Bn) * g / 2.0;
        s0 += sn;
        s1 += static_cast<double>(n) * cn;
        s2 += static_cast<double>(n) * n * sn;
    }
    const cplx L = cot + 4.0 * s0;
    const cplx L1 = -csc2 + 8.0 * s1;
    const cplx L2 = 2.0 * csc2 * cot - 16.0 * s2;
    return {eta_int_ * zi / w_ + k * L, -eta_int_ / w_ - k * k * L1, -k * k * k * L2};
}

EllipticParams::Raw EllipticParams::raw(cplx z0) const {
    if (!rotated_) return raw_internal(z0);
    Raw r = raw_internal(-I * z0);
    return {-I * r.zeta, -r.wp, I * r.wpp};
}

cplx EllipticParams::zeta(cplx z) const {
    auto [z0, n, m] = reduce(z);
    return raw(z0).zeta + 2.0 * static_cast<double>(n) * eta1_ + 2.0 * static_cast<double>(m) * eta3_;
}

cplx EllipticParams::wp(cplx z) const { return raw(reduce(z).z0).wp; }

cplx EllipticParams::wp_prime(cplx z) const { return raw(reduce(z).z0).wpp; }

cplx EllipticParams::zeta1(cplx z) const {
    auto [z0, n, m] = reduce(z);
    (void)n;
    return raw(z0).zeta - c1_ * z0 - I * (static_cast<double>(m) * pi / ell_);
}

Zeta2Values EllipticParams::eval(cplx z) const {
    auto [z0, n, m] = reduce(z);
    (void)m;
    Raw r = raw(z0);
    return {r.zeta - c2_ * z0 + static_cast<double>(n) * pi / delta_, r.wp + c2_, r.wpp};
}

cplx zeta1(cplx z, const EllipticParams& p) { return p.zeta1(z); }
cplx zeta2(cplx z, const EllipticParams& p) { return p.eval(z).zeta2; }
cplx wp2(cplx z, const EllipticParams& p) { return p.eval(z).wp2; }
cplx wp2_prime(cplx z, const EllipticParams& p) { return p.eval(z).wp2p; }
cplx f2(cplx z, const EllipticParams& p) { return p.eval(z).f2(); }
cplx f2_prime(cplx z, const EllipticParams& p) { return p.eval(z).f2p(); }

}  // namespace ncihf

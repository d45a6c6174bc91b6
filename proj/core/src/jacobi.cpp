#include "ncihf/jacobi.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "ncihf/errors.hpp"

namespace ncihf {

namespace {

void check_m(double m) {
    if (!(m > 0.0 && m < 1.0)) throw DomainError("elliptic parameter m must lie in (0,1)");
}

double agm(double a, double b) {
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return 0.5 * (a + b);
}

// Descending Landen / AGM scheme, valid for 0 <= m < 1.
SnCnDn<double> sncndn_agm(double u, double m) {
    if (m == 0.0) return {std::sin(u), std::cos(u), 1.0};
    std::array<double, 32> a{}, c{};
    a[0] = 1.0;
    double b = std::sqrt(1.0 - m);
    c[0] = std::sqrt(m);
    int n = 0;
    while (std::abs(c[static_cast<std::size_t>(n)]) > 1e-16 && n < 30) {
        auto i = static_cast<std::size_t>(n);
        a[i + 1] = 0.5 * (a[i] + b);
        c[i + 1] = 0.5 * (a[i] - b);
        b = std::sqrt(a[i] * b);
        ++n;
    }
    double phi = std::ldexp(a[static_cast<std::size_t>(n)] * u, n);
    for (int k = n; k >= 1; --k) {
        auto i = static_cast<std::size_t>(k);
        phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
    }
    double sn = std::sin(phi), cn = std::cos(phi);
    // the cn/cos(phi1 - phi0) form is 0/0 at cn = 0
    return {sn, cn, std::sqrt(1.0 - m * sn * sn)};
}

double reduce_period(double u, double period) { return u - period * std::round(u / period); }

}  // namespace

double ellip_K(double m) {
    check_m(m);
    return std::numbers::pi / (2.0 * agm(1.0, std::sqrt(1.0 - m)));
}

double ellip_Kprime(double m) {
    check_m(m);
    return ellip_K(1.0 - m);
}

JacobiParams::JacobiParams(double m_) : m(m_), K(ellip_K(m_)), Kp(ellip_Kprime(m_)) {}

SnCnDn<double> jacobi_sncndn(double u, double m) {
    if (!(m >= 0.0 && m < 1.0)) throw DomainError("elliptic parameter m must lie in [0,1) for real arguments");
    if (m > 0.0) u = reduce_period(u, 4.0 * ellip_K(m));
    return sncndn_agm(u, m);
}

SnCnDn<cplx> jacobi_sncndn(cplx z, double m, double pole_guard) {
    JacobiParams jp(m);
    double x = reduce_period(z.real(), 4.0 * jp.K);
    double y = reduce_period(z.imag(), 4.0 * jp.Kp);

    // nearest pole 2jK + (2k+1)iK'
    double j = std::round(x / (2.0 * jp.K));
    double k = std::round((y / jp.Kp - 1.0) / 2.0);
    if (std::abs(cplx(x - 2.0 * j * jp.K, y - (2.0 * k + 1.0) * jp.Kp)) < pole_guard)
        throw PoleError("Jacobi function evaluated at a pole");

    auto [s, c, d] = sncndn_agm(x, m);
    auto [s1, c1, d1] = sncndn_agm(y, 1.0 - m);
    double den = c1 * c1 + m * s * s * s1 * s1;
    return {cplx(s * d1, c * d * s1 * c1) / den,
            cplx(c * c1, -s * d * s1 * d1) / den,
            cplx(d * c1 * d1, -m * s * c * s1) / den};
}

cplx jacobi_sn(cplx z, double m) { return jacobi_sncndn(z, m).sn; }
cplx jacobi_cn(cplx z, double m) { return jacobi_sncndn(z, m).cn; }
cplx jacobi_dn(cplx z, double m) { return jacobi_sncndn(z, m).dn; }

}  // namespace ncihf

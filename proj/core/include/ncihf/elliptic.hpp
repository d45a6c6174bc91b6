#pragma once

#include <array>
#include <complex>

#include "ncihf/cvec3.hpp"

namespace ncihf {

// zeta2 together with its first two derivatives (up to sign) at one point.
struct Zeta2Values {
    cplx zeta2;  // zeta2(z)
    cplx wp2;    // wp2(z) = -zeta2'(z)
    cplx wp2p;   // wp2'(z)

    cplx f2() const { return zeta2 * zeta2 - wp2; }
    cplx f2p() const { return -2.0 * zeta2 * wp2 - wp2p; }
};

// Rectangular lattice with half-periods ell (real) and i*delta, plus the cached
// quasi-period constants. Evaluation uses the theta-function q-series on whichever
// orientation of the lattice has the smaller nome, after reduction into the
// centred period cell.
class EllipticParams {
public:
    class Builder {
    public:
        Builder& ell(double v) { ell_ = v; return *this; }
        Builder& delta(double v) { delta_ = v; return *this; }
        Builder& pole_guard(double v) { guard_ = v; return *this; }
        Builder& legendre_tol(double v) { legendre_tol_ = v; return *this; }
        EllipticParams build() const;

    private:
        double ell_ = 1.0;
        double delta_ = 1.0;
        double guard_ = 1e-8;
        double legendre_tol_ = 1e-10;
    };

    EllipticParams(double ell, double delta, double pole_guard = 1e-8, double legendre_tol = 1e-10);

    double ell() const { return ell_; }
    double delta() const { return delta_; }
    double pole_guard() const { return guard_; }
    double nome() const { return q_; }  // of the orientation actually used
    bool rotated() const { return rotated_; }

    cplx zeta_ell() const { return eta1_; }     // zeta(ell)
    cplx zeta_idelta() const { return eta3_; }  // zeta(i delta)
    cplx c2() const { return c2_; }             // zeta(i delta)/(i delta)
    cplx c1() const { return c1_; }             // zeta(ell)/ell
    double legendre_defect() const { return legendre_defect_; }

    // Plain Weierstrass functions of the lattice.
    cplx zeta(cplx z) const;
    cplx wp(cplx z) const;
    cplx wp_prime(cplx z) const;

    cplx zeta1(cplx z) const;
    Zeta2Values eval(cplx z) const;

    // Distance from z to the nearest lattice point.
    double lattice_distance(cplx z) const;

    bool operator==(const EllipticParams& o) const {
        return ell_ == o.ell_ && delta_ == o.delta_ && guard_ == o.guard_;
    }

private:
    struct Raw {
        cplx zeta, wp, wpp;
    };
    struct Reduced {
        cplx z0;
        long n, m;  // z = z0 + 2n ell + 2m i delta
    };

    Reduced reduce(cplx z) const;
    Raw raw(cplx z0) const;           // at a reduced point, external orientation
    Raw raw_internal(cplx zi) const;  // internal orientation, real half-period w_

    static constexpr int kMaxTerms = 64;

    double ell_, delta_, guard_;
    bool rotated_ = false;
    double w_ = 0, wprime_ = 0;  // internal half-periods w (real) and i*wprime
    double q_ = 0, logq_ = 0;
    int nterms_ = 0;
    std::array<double, kMaxTerms + 1> inv1mq2n_{};  // 1/(1 - q^{2n})
    double eta_int_ = 0;
    cplx eta1_, eta3_, c1_, c2_;
    double legendre_defect_ = 0;
};

cplx zeta1(cplx z, const EllipticParams& p);
cplx zeta2(cplx z, const EllipticParams& p);
cplx wp2(cplx z, const EllipticParams& p);
cplx wp2_prime(cplx z, const EllipticParams& p);
cplx f2(cplx z, const EllipticParams& p);
cplx f2_prime(cplx z, const EllipticParams& p);

}  // namespace ncihf

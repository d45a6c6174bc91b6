#pragma once

#include <complex>

#include "ncihf/cvec3.hpp"

namespace ncihf {

double ellip_K(double m);
double ellip_Kprime(double m);

struct JacobiParams {
    double m;
    double K;
    double Kp;

    explicit JacobiParams(double m);
};

template <class T>
struct SnCnDn {
    T sn, cn, dn;
};

SnCnDn<double> jacobi_sncndn(double u, double m);
SnCnDn<cplx> jacobi_sncndn(cplx z, double m, double pole_guard = 1e-8);

cplx jacobi_sn(cplx z, double m);
cplx jacobi_cn(cplx z, double m);
cplx jacobi_dn(cplx z, double m);

}  // namespace ncihf

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "ncihf/spincm.hpp"

namespace ncihf {

// Uniform endpoint-exclusive grid on [-ell, ell).
std::vector<double> periodic_grid(double ell, std::size_t n);

struct FieldPair {
    std::vector<CVec3> u, v;
};

struct FieldSample {
    std::vector<double> x;
    std::vector<CVec3> u, v;
    std::vector<cplx> u2, v2;  // u.u and v.v (bilinear)
    // optional columns, empty unless filled
    std::vector<CVec3> u_x, v_x, u_t, v_t;
    std::vector<double> eps_u, eps_v;
};

// Throws InadmissibleState when a pole has left its strip.
FieldSample eval_field(const SpinCMState& st, std::span<const double> grid);

FieldPair eval_x_derivative(const SpinCMState& st, std::span<const double> grid);

// Chain-rule time derivative using the state's velocities and the spin/background right-hand sides.
FieldPair eval_time_derivative(const SpinCMState& st, std::span<const double> grid);

// wp2 has period mean -pi/(2 ell delta), so the operator pair maps the constant part of u_x, v_x
// to a rigid rotation instead of the eigenvalue the pole dynamics assume. The ansatz carried by
// the pole equations solves the field equation in a frame rotating with this angular velocity
// (pi/(2 ell delta) times the summed spins of both families, conserved); at each instant
// u_t + rate ^ u is the lab-frame time derivative.
CVec3 frame_rotation_rate(const SpinCMState& st);

struct EnergyDensity {
    std::vector<double> eps_u, eps_v;
    double H = 0;  // trapezoid integral of eps_u + eps_v over the period
};

// Densities -u.(T u_x - Tt v_x)/2 and -v.(T v_x - Tt u_x)/2 in closed form; requires a real-reduction state.
EnergyDensity energy_density(const SpinCMState& st, std::span<const double> grid, double reduction_tol = 1e-8);

// CSV with columns x, u1_re, u1_im, ..., v3_im, u2_abs, eps_u, eps_v
void write_field_csv(std::ostream& os, const FieldSample& f);

}  // namespace ncihf

#pragma once

#include <vector>

#include "ncihf/cvec3.hpp"
#include "ncihf/elliptic.hpp"

namespace ncihf {

// Poles, velocities and spins of both families plus the background vector.
// The a-family lives in the upper strip, the b-family in the lower one.
struct SpinCMState {
    explicit SpinCMState(EllipticParams p) : params(std::move(p)) {}

    std::vector<cplx> a, adot;
    std::vector<CVec3> s;
    std::vector<cplx> b, bdot;
    std::vector<CVec3> t;
    CVec3 phi;
    cplx rho{1.0, 0.0};
    EllipticParams params;
    double time = 0.0;

    std::size_t N() const { return a.size(); }
    std::size_t M() const { return b.size(); }
    void validate_shapes() const;  // throws ConfigError on inconsistent lengths
};

struct FamilyPair {
    std::vector<cplx> a, b;
};

struct SpinRates {
    std::vector<CVec3> s, t;
};

// Second-order pole equations for both families.
FamilyPair accel(const SpinCMState& st);

// Spin equations; potential_shift adds a constant to wp2 in the spin coupling only.
SpinRates spin_rhs(const SpinCMState& st, cplx potential_shift = 0.0);

CVec3 phi_rhs(const SpinCMState& st);

// The bracketed vectors of the first-order system: B_j for the a-family and C_k for the b-family.
struct BacklundVectors {
    std::vector<CVec3> a, b;
};
BacklundVectors backlund_vectors(const SpinCMState& st);

// Velocities solving the first-order system when the null and orthogonality constraints hold.
FamilyPair backlund_velocity(const SpinCMState& st);

struct ConstraintReport {
    double null_spin = 0;          // max |s.s|, |t.t|
    double orthogonality = 0;      // max |s_j . B_j|, |t_k . C_k|
    double spin_balance = 0;       // max component of |sum s - sum t|
    double background = 0;         // |R - rho^2|
    double strip_margin = 0;       // min distance of Im a_j, Im b_k to the strip edges; negative when outside
    double min_separation = 0;     // min lattice distance among a_j - a_k, b_j - b_k, a_j - b_k + i delta
    double min_spin_norm = 0;      // min Hermitian norm s.s*
    double max_residual() const;
    bool passes(double tol) const;
};

ConstraintReport constraint_residuals(const SpinCMState& st);

struct ConservedQuantities {
    std::vector<cplx> P;  // s_j.s_j then t_k.t_k
    std::vector<cplx> Q;  // s_j.B_j then t_k.C_k
    cplx R;
    CVec3 S, T;
};

ConservedQuantities conserved_quantities(const SpinCMState& st);

// Complex rotation exp(2 c S t) of the total a-family spin S, in Rodrigues form.
CMat3 frame_rotation(const CVec3& S, cplx c, double t);

// Spins rotated by frame_rotation: a-family with S = sum s, b-family with T = sum t.
SpinCMState rotate_frame(const SpinCMState& st, cplx c, double t);

// max deviation from b = a*, t = s*, Im phi = 0; infinity on shape mismatch
double real_reduction_defect(const SpinCMState& st);

}  // namespace ncihf

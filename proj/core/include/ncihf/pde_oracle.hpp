#pragma once

#include <span>
#include <string>
#include <vector>

#include "ncihf/ansatz.hpp"
#include "ncihf/elliptic.hpp"

namespace ncihf {

enum class OperatorMethod { PvQuadrature, SpectralMultiplier };

const char* to_string(OperatorMethod m);
OperatorMethod operator_method_from_string(const std::string& s);

// Discretisation of the two periodic integral operators on the uniform grid of [-ell, ell).
// T has the kernel zeta1(x' - x)/pi taken as a principal value; Ttilde has zeta1(x' - x + i delta)/pi.
class OperatorEvaluator {
public:
    OperatorEvaluator(EllipticParams params, std::size_t n, OperatorMethod method);

    std::size_t size() const { return n_; }
    OperatorMethod method() const { return method_; }
    const EllipticParams& params() const { return params_; }
    const std::vector<double>& grid() const { return grid_; }

    std::vector<cplx> apply_T(std::span<const cplx> f) const;
    std::vector<cplx> apply_Ttilde(std::span<const cplx> f) const;
    std::vector<CVec3> apply_T(std::span<const CVec3> f) const;
    std::vector<CVec3> apply_Ttilde(std::span<const CVec3> f) const;

    // Multipliers on exp(i pi k x / ell), FFT order (k = 0, 1, ..., n/2, -n/2+1, ..., -1).
    const std::vector<cplx>& symbol_T() const { return sym_T_; }
    const std::vector<cplx>& symbol_Ttilde() const { return sym_Tt_; }

    // Largest Fourier magnitude in the upper quarter of the band relative to the largest overall.
    double spectral_tail(std::span<const cplx> f) const;

    // Spectral derivative of periodic samples.
    std::vector<cplx> derivative(std::span<const cplx> f) const;

private:
    std::vector<cplx> pv_T(std::span<const cplx> f) const;
    std::vector<cplx> direct_Ttilde(std::span<const cplx> f) const;
    std::vector<cplx> multiply(std::span<const cplx> f, const std::vector<cplx>& sym) const;

    EllipticParams params_;
    std::size_t n_;
    OperatorMethod method_;
    double h_;
    std::vector<double> grid_;
    std::vector<cplx> kern_T_, kern_Tt_;  // (h/pi) * kernel at offset m*h, m = 0..n-1 (kern_T_[0] unused)
    std::vector<double> wavenumber_;
    std::vector<cplx> sym_T_, sym_Tt_;
};

std::vector<cplx> fft(std::span<const cplx> f);
std::vector<cplx> ifft(std::span<const cplx> F);

struct FieldBundle {
    std::vector<CVec3> u, v, u_t, v_t, u_x, v_x;
};

// Analytic fields and derivatives. With lab_frame the rigid rotation at frame_rotation_rate is
// added to u_t and v_t; without it u_t, v_t are the bare chain rule through the pole equations.
FieldBundle ansatz_fields(const SpinCMState& st, std::span<const double> grid, bool lab_frame = true);

// Pointwise |u_t - u ^ (T u_x - Tt v_x)| + |v_t + v ^ (T v_x - Tt u_x)|, maximised over the grid.
double field_residual(const FieldBundle& f, const OperatorEvaluator& ops);

// (u, v)(x) -> (-v(-x), -u(-x)) on a grid symmetric under x -> -x mod 2 ell.
FieldBundle parity_transform(const FieldBundle& f);

struct ResidualOptions {
    std::vector<double> excluded_times;  // e.g. the breather's non-differentiable instants
    double exclusion_window = 0.05;
    bool lab_frame = true;
};

struct ResidualReport {
    double time = 0;
    std::size_t grid_n = 0;
    OperatorMethod method = OperatorMethod::PvQuadrature;
    double max_residual = 0;
    bool excluded = false;
    double spectral_tail = 0;
    double pole_frame_residual = 0;  // same check with the bare chain-rule time derivative
    bool lab_frame = true;
    std::string to_json() const;
};

ResidualReport pde_residual(const SpinCMState& st, const OperatorEvaluator& ops, const ResidualOptions& opt = {});

// T/4 + n T/2 up to t_max
std::vector<double> breather_kink_times(double period, double t_max);

}  // namespace ncihf

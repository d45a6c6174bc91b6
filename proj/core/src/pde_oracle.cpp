#include "ncihf/pde_oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "json.hpp"
#include "ncihf/errors.hpp"

namespace ncihf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

std::mutex& planner_mutex() {
    static std::mutex m;  // FFTW planning is not thread-safe
    return m;
}

std::vector<cplx> run_fft(std::span<const cplx> in, int sign) {
    const int n = static_cast<int>(in.size());
    std::vector<cplx> src(in.begin(), in.end()), out(in.size());
    auto* ip = reinterpret_cast<fftw_complex*>(src.data());
    auto* op = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(n, ip, op, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace

std::vector<cplx> fft(std::span<const cplx> f) { return run_fft(f, FFTW_FORWARD); }

std::vector<cplx> ifft(std::span<const cplx> F) {
    auto out = run_fft(F, FFTW_BACKWARD);
    const double s = 1.0 / static_cast<double>(F.size());
    for (auto& v : out) v *= s;
    return out;
}

const char* to_string(OperatorMethod m) { return m == OperatorMethod::PvQuadrature ? "pv" : "spectral"; }

OperatorMethod operator_method_from_string(const std::string& s) {
    if (s == "pv") return OperatorMethod::PvQuadrature;
    if (s == "spectral") return OperatorMethod::SpectralMultiplier;
    throw ConfigError("unknown operator method '" + s + "' (expected pv or spectral)");
}

OperatorEvaluator::OperatorEvaluator(EllipticParams params, std::size_t n, OperatorMethod method)
    : params_(std::move(params)), n_(n), method_(method) {
    if (n_ < 4 || n_ % 2 != 0) throw ConfigError("operator grid needs an even number of points >= 4");
    const double ell = params_.ell();
    h_ = 2 * ell / static_cast<double>(n_);
    grid_ = periodic_grid(ell, n_);

    kern_T_.assign(n_, 0.0);
    kern_Tt_.assign(n_, 0.0);
    const double w = h_ / pi;
    for (std::size_t m = 0; m < n_; ++m) {
        // offsets taken in (-ell, ell] so the tables are symmetric by construction
        double off = static_cast<double>(m) * h_;
        if (off > ell) off -= 2 * ell;
        if (m != 0) kern_T_[m] = w * params_.zeta1(cplx(off, 0.0));
        kern_Tt_[m] = w * params_.zeta1(cplx(off, params_.delta()));
    }

    wavenumber_.assign(n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
        long kk = static_cast<long>(k);
        if (k > n_ / 2) kk -= static_cast<long>(n_);
        if (k == n_ / 2) kk = 0;  // Nyquist mode has no unambiguous derivative
        wavenumber_[k] = pi * static_cast<double>(kk) / ell;
    }

    // symbols: the quadratures applied to each Fourier mode at x = grid[0]
    sym_T_.assign(n_, 0.0);
    sym_Tt_.assign(n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
        cplx st = w * (I * wavenumber_[k]), stt = 0.0;
        for (std::size_t m = 0; m < n_; ++m) {
            const cplx e = std::polar(1.0, 2 * pi * static_cast<double>((k * m) % n_) / static_cast<double>(n_));
            if (m != 0) st += kern_T_[m] * (e - 1.0);
            stt += kern_Tt_[m] * e;
        }
        sym_T_[k] = st;
        sym_Tt_[k] = stt;
    }
}

std::vector<cplx> OperatorEvaluator::derivative(std::span<const cplx> f) const {
    if (f.size() != n_) throw ConfigError("sample count does not match the operator grid");
    auto F = fft(f);
    for (std::size_t k = 0; k < n_; ++k) F[k] *= I * wavenumber_[k];
    return ifft(F);
}

std::vector<cplx> OperatorEvaluator::pv_T(std::span<const cplx> f) const {
    const auto df = derivative(f);
    std::vector<cplx> out(n_);
    const double w = h_ / pi;
    for (std::size_t i = 0; i < n_; ++i) {
        cplx acc = w * df[i];  // removable point: zeta1(y)(f(x+y) - f(x)) -> f'(x)
        for (std::size_t m = 1; m < n_; ++m) acc += kern_T_[m] * (f[(i + m) % n_] - f[i]);
        out[i] = acc;
    }
    return out;
}

std::vector<cplx> OperatorEvaluator::direct_Ttilde(std::span<const cplx> f) const {
    std::vector<cplx> out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        cplx acc = 0;
        for (std::size_t m = 0; m < n_; ++m) acc += kern_Tt_[m] * f[(i + m) % n_];
        out[i] = acc;
    }
    return out;
}

std::vector<cplx> OperatorEvaluator::multiply(std::span<const cplx> f, const std::vector<cplx>& sym) const {
    auto F = fft(f);
    for (std::size_t k = 0; k < n_; ++k) F[k] *= sym[k];
    return ifft(F);
}

std::vector<cplx> OperatorEvaluator::apply_T(std::span<const cplx> f) const {
    if (f.size() != n_) throw ConfigError("sample count does not match the operator grid");
    return method_ == OperatorMethod::PvQuadrature ? pv_T(f) : multiply(f, sym_T_);
}

std::vector<cplx> OperatorEvaluator::apply_Ttilde(std::span<const cplx> f) const {
    if (f.size() != n_) throw ConfigError("sample count does not match the operator grid");
    return method_ == OperatorMethod::PvQuadrature ? direct_Ttilde(f) : multiply(f, sym_Tt_);
}

namespace {

template <class Op>
std::vector<CVec3> componentwise(std::span<const CVec3> f, Op op) {
    std::vector<CVec3> out(f.size());
    std::vector<cplx> comp(f.size());
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < f.size(); ++i) comp[i] = f[i][c];
        auto r = op(comp);
        for (std::size_t i = 0; i < f.size(); ++i) out[i][c] = r[i];
    }
    return out;
}

}  // namespace

std::vector<CVec3> OperatorEvaluator::apply_T(std::span<const CVec3> f) const {
    return componentwise(f, [this](const std::vector<cplx>& g) { return apply_T(std::span<const cplx>(g)); });
}

std::vector<CVec3> OperatorEvaluator::apply_Ttilde(std::span<const CVec3> f) const {
    return componentwise(f, [this](const std::vector<cplx>& g) { return apply_Ttilde(std::span<const cplx>(g)); });
}

double OperatorEvaluator::spectral_tail(std::span<const cplx> f) const {
    auto F = fft(f);
    double top = 0, tail = 0;
    for (std::size_t k = 0; k < n_; ++k) {
        long kk = static_cast<long>(k <= n_ / 2 ? k : n_ - k);
        top = std::max(top, std::abs(F[k]));
        if (kk > static_cast<long>(n_ / 4)) tail = std::max(tail, std::abs(F[k]));
    }
    return top > 0 ? tail / top : 0.0;
}

FieldBundle ansatz_fields(const SpinCMState& st, std::span<const double> grid, bool lab_frame) {
    FieldBundle b;
    auto f = eval_field(st, grid);
    b.u = std::move(f.u);
    b.v = std::move(f.v);
    auto d = eval_x_derivative(st, grid);
    b.u_x = std::move(d.u);
    b.v_x = std::move(d.v);
    auto t = eval_time_derivative(st, grid);
    b.u_t = std::move(t.u);
    b.v_t = std::move(t.v);
    if (lab_frame) {
        const CVec3 w = frame_rotation_rate(st);
        for (std::size_t i = 0; i < b.u.size(); ++i) {
            b.u_t[i] = b.u_t[i] + cross(w, b.u[i]);
            b.v_t[i] = b.v_t[i] + cross(w, b.v[i]);
        }
    }
    return b;
}

double field_residual(const FieldBundle& f, const OperatorEvaluator& ops) {
    const auto Tux = ops.apply_T(std::span<const CVec3>(f.u_x));
    const auto Tvx = ops.apply_T(std::span<const CVec3>(f.v_x));
    const auto Ttux = ops.apply_Ttilde(std::span<const CVec3>(f.u_x));
    const auto Ttvx = ops.apply_Ttilde(std::span<const CVec3>(f.v_x));
    double worst = 0;
    auto norm = [](const CVec3& v) { return std::sqrt(herm_norm2(v)); };
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        const CVec3 ru = f.u_t[i] - cross(f.u[i], Tux[i] - Ttvx[i]);
        const CVec3 rv = f.v_t[i] + cross(f.v[i], Tvx[i] - Ttux[i]);
        worst = std::max(worst, norm(ru) + norm(rv));
    }
    return worst;
}

FieldBundle parity_transform(const FieldBundle& f) {
    const std::size_t n = f.u.size();
    FieldBundle g;
    auto mirror = [n](const std::vector<CVec3>& src, double sign) {
        std::vector<CVec3> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = sign * src[(n - i) % n];
        return out;
    };
    // u'(x) = -v(-x): u'_t = -v_t(-x), u'_x = +v_x(-x)
    g.u = mirror(f.v, -1);
    g.v = mirror(f.u, -1);
    g.u_t = mirror(f.v_t, -1);
    g.v_t = mirror(f.u_t, -1);
    g.u_x = mirror(f.v_x, 1);
    g.v_x = mirror(f.u_x, 1);
    return g;
}

std::string ResidualReport::to_json() const {
    nlohmann::json j;
    j["time"] = time;
    j["grid_n"] = grid_n;
    j["method"] = to_string(method);
    if (excluded)
        j["max_residual"] = nullptr;
    else
        j["max_residual"] = max_residual;
    j["excluded"] = excluded;
    j["lab_frame"] = lab_frame;
    if (!excluded) j["pole_frame_residual"] = pole_frame_residual;
    j["spectral_tail"] = spectral_tail;
    return j.dump();
}

ResidualReport pde_residual(const SpinCMState& st, const OperatorEvaluator& ops, const ResidualOptions& opt) {
    if (!(st.params == ops.params())) throw ConfigError("state and operator use different lattices");
    ResidualReport r;
    r.time = st.time;
    r.grid_n = ops.size();
    r.method = ops.method();
    r.lab_frame = opt.lab_frame;
    for (double tk : opt.excluded_times)
        if (std::abs(st.time - tk) < opt.exclusion_window) {
            r.excluded = true;
            r.max_residual = std::nan("");
            return r;
        }
    auto f = ansatz_fields(st, ops.grid(), false);
    std::vector<cplx> comp(f.u_x.size());
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = f.u_x[i][c];
        r.spectral_tail = std::max(r.spectral_tail, ops.spectral_tail(comp));
    }
    r.pole_frame_residual = field_residual(f, ops);
    if (opt.lab_frame) {
        const CVec3 w = frame_rotation_rate(st);
        for (std::size_t i = 0; i < f.u.size(); ++i) {
            f.u_t[i] = f.u_t[i] + cross(w, f.u[i]);
            f.v_t[i] = f.v_t[i] + cross(w, f.v[i]);
        }
        r.max_residual = field_residual(f, ops);
    } else {
        r.max_residual = r.pole_frame_residual;
    }
    return r;
}

std::vector<double> breather_kink_times(double period, double t_max) {
    std::vector<double> out;
    for (int n = 0;; ++n) {
        double t = period / 4 + n * period / 2;
        if (t > t_max) break;
        out.push_back(t);
    }
    return out;
}

}  // namespace ncihf

#include "ncihf/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <span>

#include "ncihf/errors.hpp"

namespace ncihf {

const char* to_string(EvolutionMode m) {
    return m == EvolutionMode::SecondOrder ? "second-order" : "first-order-backlund";
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::TimeLimit: return "time-limit";
        case Termination::AdmissibilityEvent: return "admissibility-event";
        case Termination::StepFailure: return "step-failure";
    }
    return "unknown";
}

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0)) throw ConfigError("integrator tolerances must be positive");
    if (!(min_step > 0) || !(min_step < max_step)) throw ConfigError("integrator needs 0 < min_step < max_step");
    if (output_dt < 0) throw ConfigError("output interval must be non-negative");
}

// ---------------------------------------------------------------------------
// packing

namespace {

struct Writer {
    std::vector<double>& y;
    void put(cplx z) {
        y.push_back(z.real());
        y.push_back(z.imag());
    }
    void put(const CVec3& v) {
        for (int c = 0; c < 3; ++c) put(v[c]);
    }
};

struct Reader {
    const std::vector<double>& y;
    std::size_t i = 0;
    cplx cx() {
        cplx z(y[i], y[i + 1]);
        i += 2;
        return z;
    }
    CVec3 vec() {
        CVec3 v;
        for (int c = 0; c < 3; ++c) v[c] = cx();
        return v;
    }
};

}  // namespace

StatePacker::StatePacker(const SpinCMState& prototype, EvolutionMode mode, bool real_mode)
    : proto_(prototype), mode_(mode), real_(real_mode), N_(prototype.N()), M_(prototype.M()) {
    prototype.validate_shapes();
    if (real_ && N_ != M_) throw ConfigError("real mode needs equal family sizes");
    const std::size_t per_pole = (mode_ == EvolutionMode::SecondOrder ? 2 : 1) + 3;
    size_ = 2 * (per_pole * N_ + (real_ ? 0 : per_pole * M_) + 3);
}

std::vector<double> StatePacker::pack(const SpinCMState& st) const {
    std::vector<double> y;
    y.reserve(size_);
    Writer w{y};
    const bool second = mode_ == EvolutionMode::SecondOrder;
    for (std::size_t j = 0; j < N_; ++j) {
        w.put(st.a[j]);
        if (second) w.put(st.adot[j]);
        w.put(st.s[j]);
    }
    if (!real_)
        for (std::size_t k = 0; k < M_; ++k) {
            w.put(st.b[k]);
            if (second) w.put(st.bdot[k]);
            w.put(st.t[k]);
        }
    w.put(st.phi);
    return y;
}

SpinCMState StatePacker::unpack(const std::vector<double>& y, double t) const {
    SpinCMState st = proto_;
    st.time = t;
    Reader r{y};
    const bool second = mode_ == EvolutionMode::SecondOrder;
    for (std::size_t j = 0; j < N_; ++j) {
        st.a[j] = r.cx();
        if (second) st.adot[j] = r.cx();
        st.s[j] = r.vec();
    }
    if (real_) {
        for (std::size_t k = 0; k < M_; ++k) {
            st.b[k] = std::conj(st.a[k]);
            st.bdot[k] = std::conj(st.adot[k]);
            st.t[k] = conj(st.s[k]);
        }
    } else {
        for (std::size_t k = 0; k < M_; ++k) {
            st.b[k] = r.cx();
            if (second) st.bdot[k] = r.cx();
            st.t[k] = r.vec();
        }
    }
    st.phi = r.vec();
    if (real_)
        for (int c = 0; c < 3; ++c) st.phi[c] = st.phi[c].real();
    if (!second) {
        auto v = backlund_velocity(st);
        st.adot = v.a;
        st.bdot = real_ ? std::vector<cplx>() : v.b;
        if (real_)
            for (cplx a : v.a) st.bdot.push_back(std::conj(a));
    }
    return st;
}

void StatePacker::rhs(const std::vector<double>& y, double t, std::vector<double>& dy, cplx shift) const {
    const SpinCMState st = unpack(y, t);
    const bool second = mode_ == EvolutionMode::SecondOrder;
    FamilyPair acc;
    if (second) acc = accel(st);
    const SpinRates rates = spin_rhs(st, shift);
    CVec3 phidot = phi_rhs(st);
    if (real_)
        for (int c = 0; c < 3; ++c) phidot[c] = phidot[c].real();
    dy.clear();
    Writer w{dy};
    for (std::size_t j = 0; j < N_; ++j) {
        w.put(st.adot[j]);
        if (second) w.put(acc.a[j]);
        w.put(rates.s[j]);
    }
    if (!real_)
        for (std::size_t k = 0; k < M_; ++k) {
            w.put(st.bdot[k]);
            if (second) w.put(acc.b[k]);
            w.put(rates.t[k]);
        }
    w.put(phidot);
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with Hairer's continuous extension

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

using Vec = std::vector<double>;

double event_min(const SpinCMState& st, const EventMargins& ev, std::string* which) {
    double g = std::numeric_limits<double>::infinity();
    auto take = [&](double v, const char* name) {
        if (v < g) {
            g = v;
            if (which) *which = name;
        }
    };
    const double d = st.params.delta();
    if (ev.strip) {
        for (cplx a : st.a) {
            take(a.imag() - d / 2 - ev.strip_margin, "a-pole reached the lower strip edge");
            take(1.5 * d - a.imag() - ev.strip_margin, "a-pole reached the upper strip edge");
        }
        for (cplx b : st.b) {
            take(b.imag() + 1.5 * d - ev.strip_margin, "b-pole reached the lower strip edge");
            take(-d / 2 - b.imag() - ev.strip_margin, "b-pole reached the upper strip edge");
        }
    }
    if (ev.collision) {
        const auto& p = st.params;
        for (std::size_t j = 0; j < st.N(); ++j)
            for (std::size_t k = j + 1; k < st.N(); ++k)
                take(p.lattice_distance(st.a[j] - st.a[k]) - ev.collision_margin, "a-poles collided");
        for (std::size_t j = 0; j < st.M(); ++j)
            for (std::size_t k = j + 1; k < st.M(); ++k)
                take(p.lattice_distance(st.b[j] - st.b[k]) - ev.collision_margin, "b-poles collided");
        for (cplx a : st.a)
            for (cplx b : st.b)
                take(p.lattice_distance(a - b + cplx(0, d)) - ev.collision_margin, "mixed poles collided");
    }
    if (ev.spin_norm) {
        for (const auto& s : st.s) take(herm_norm2(s) - ev.spin_margin, "a-spin norm vanished");
        for (const auto& t : st.t) take(herm_norm2(t) - ev.spin_margin, "b-spin norm vanished");
    }
    return g;
}

double rms_scaled(const Vec& v, const Vec& sc) {
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] / sc[i]) * (v[i] / sc[i]);
    return std::sqrt(s / static_cast<double>(std::max<std::size_t>(v.size(), 1)));
}

}  // namespace

std::vector<double> DenseSegment::eval(double t) const {
    const double h = t1 - t0;
    const double th = h > 0 ? (t - t0) / h : 0.0;
    const double th1 = 1.0 - th;
    Vec y(r1.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
    return y;
}

double Trajectory::t_begin() const { return snapshots.empty() ? 0.0 : snapshots.front().time; }
double Trajectory::t_end() const { return snapshots.empty() ? 0.0 : snapshots.back().time; }

SpinCMState Trajectory::state_at(double t) const {
    if (dense.empty() || !packer) throw ConfigError("trajectory has no dense output (set keep_dense)");
    if (t < dense.front().t0 || t > dense.back().t1) throw ConfigError("time outside the integrated interval");
    auto it = std::lower_bound(dense.begin(), dense.end(), t, [](const DenseSegment& s, double v) { return s.t1 < v; });
    if (it == dense.end()) it = std::prev(dense.end());
    return packer->unpack(it->eval(t), t);
}

Trajectory integrate(const SpinCMState& state0, double t_end, const IntegratorConfig& cfg) {
    cfg.validate();
    state0.validate_shapes();
    if (cfg.real_mode && !(real_reduction_defect(state0) <= 1e-10))
        throw ConfigError("real mode requested but the initial state is not a real reduction");
    if (cfg.check_admission) {
        auto rep = constraint_residuals(state0);
        if (!(rep.max_residual() <= cfg.admission_tol)) {
            std::ostringstream os;
            os << "initial state fails the constraints (max residual " << rep.max_residual() << ")";
            throw ConfigError(os.str());
        }
    }

    Trajectory traj;
    traj.mode = cfg.mode;
    traj.real_mode = cfg.real_mode;
    const StatePacker pk(state0, cfg.mode, cfg.real_mode);
    traj.packer = pk;
    const cplx shift = cfg.potential_shift;
    auto f = [&](const Vec& y, double t, Vec& dy) { pk.rhs(y, t, dy, shift); };

    double t = state0.time;
    Vec y = pk.pack(state0);
    SpinCMState cur = pk.unpack(y, t);
    traj.snapshots.push_back(cur);
    std::string which;
    if (event_min(cur, cfg.events, &which) <= 0) {
        traj.reason = Termination::AdmissibilityEvent;
        traj.message = which + " at t=" + std::to_string(t);
        return traj;
    }
    if (t_end <= t) return traj;

    const std::size_t n = y.size();
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), y1(n), err(n), sc(n);
    f(y, t, k1);

    // initial step (Hairer's heuristic)
    for (std::size_t i = 0; i < n; ++i) sc[i] = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
    double dn0 = rms_scaled(y, sc), dn1 = rms_scaled(k1, sc);
    double h = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h = std::min(h, cfg.max_step);
    for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * k1[i];
    f(yt, t + h, k2);
    for (std::size_t i = 0; i < n; ++i) err[i] = (k2[i] - k1[i]) / h;
    double dn2 = rms_scaled(err, sc);
    double hm = std::max(dn1, dn2) <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / std::max(dn1, dn2), 0.2);
    h = std::min({100 * h, hm, cfg.max_step});

    const double t0 = t;
    const bool sampled = cfg.output_dt > 0;
    std::size_t next_k = 1;
    auto out_time = [&](std::size_t k) { return t0 + static_cast<double>(k) * cfg.output_dt; };
    const double teps = 1e-12 * std::max(1.0, std::abs(t_end));

    auto fail = [&](const std::string& why) {
        traj.reason = Termination::StepFailure;
        traj.message = why;
    };

    while (t < t_end - teps) {
        if (traj.accepted + traj.rejected >= cfg.max_steps) {
            fail("step budget exhausted");
            break;
        }
        double t1;
        h = std::min(h, cfg.max_step);
        if (t + h >= t_end - teps) {
            h = t_end - t;
            t1 = t_end;
        } else {
            t1 = t + h;
        }
        if (sampled && cfg.land_on_output && out_time(next_k) < t1 - teps) {
            t1 = out_time(next_k);
            h = t1 - t;
        }

        double errn;
        try {
            for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
            f(yt, t + c2 * h, k2);
            for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            f(yt, t + c3 * h, k3);
            for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            f(yt, t + c4 * h, k4);
            for (std::size_t i = 0; i < n; ++i)
                yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            f(yt, t + c5 * h, k5);
            for (std::size_t i = 0; i < n; ++i)
                yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            f(yt, t1, k6);
            for (std::size_t i = 0; i < n; ++i)
                y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            f(y1, t1, k7);
            for (std::size_t i = 0; i < n; ++i) {
                err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                sc[i] = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            }
            errn = rms_scaled(err, sc);
        } catch (const std::exception& e) {
            // a stage left the domain of the right-hand side: shrink and retry
            ++traj.rejected;
            h *= 0.25;
            if (h < cfg.min_step) {
                fail(std::string("step size underflow near t=") + std::to_string(t) + ": " + e.what());
                break;
            }
            continue;
        }

        if (!(errn <= 1.0)) {
            ++traj.rejected;
            double fac = std::isfinite(errn) ? std::max(0.2, 0.9 * std::pow(errn, -0.2)) : 0.2;
            h *= fac;
            if (h < cfg.min_step) {
                fail("step size underflow near t=" + std::to_string(t));
                break;
            }
            continue;
        }

        // accepted
        ++traj.accepted;
        DenseSegment seg;
        seg.t0 = t;
        seg.t1 = t1;
        seg.r1 = y;
        seg.r2.resize(n);
        seg.r3.resize(n);
        seg.r4.resize(n);
        seg.r5.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double ydiff = y1[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            seg.r2[i] = ydiff;
            seg.r3[i] = bspl;
            seg.r4[i] = ydiff - h * k7[i] - bspl;
            seg.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }

        SpinCMState st1 = pk.unpack(y1, t1);
        double g1 = event_min(st1, cfg.events, &which);
        double t_stop = t1;
        bool event = g1 <= 0;
        SpinCMState stop_state = st1;
        if (event) {
            // earliest sign change of the minimum margin, bisected on the continuous extension
            auto G = [&](double tt) {
                try {
                    return event_min(pk.unpack(seg.eval(tt), tt), cfg.events, nullptr);
                } catch (const std::exception&) {
                    return -1.0;
                }
            };
            double lo = t, hi = t1;
            for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
                double mid = 0.5 * (lo + hi);
                (G(mid) > 0 ? lo : hi) = mid;
            }
            t_stop = lo;
            stop_state = pk.unpack(seg.eval(lo), lo);
            event_min(pk.unpack(seg.eval(hi), hi), cfg.events, &which);
        }

        if (sampled) {
            while (out_time(next_k) <= t_stop + teps && out_time(next_k) <= t_end + teps) {
                const double to = out_time(next_k);
                if (std::abs(to - t1) <= teps && !event)
                    traj.snapshots.push_back(st1);
                else if (to > traj.snapshots.back().time)
                    traj.snapshots.push_back(pk.unpack(seg.eval(to), to));
                ++next_k;
            }
        } else if (!event) {
            traj.snapshots.push_back(st1);
        }
        if (cfg.keep_dense) traj.dense.push_back(std::move(seg));

        if (event) {
            if (stop_state.time > traj.snapshots.back().time) traj.snapshots.push_back(stop_state);
            traj.reason = Termination::AdmissibilityEvent;
            std::ostringstream os;
            os << which << " at t=" << std::setprecision(10) << t_stop;
            traj.message = os.str();
            return traj;
        }

        t = t1;
        y = y1;
        k1 = k7;
        double fac = errn > 0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(errn, -0.2))) : 5.0;
        h *= fac;
    }

    if (traj.snapshots.back().time < t - teps) traj.snapshots.push_back(pk.unpack(y, t));
    return traj;
}

// ---------------------------------------------------------------------------
// diagnostics

double DriftReport::max() const { return std::max({P, Q, R, S, T, S_minus_T}); }

DriftReport conservation_drift(const Trajectory& traj) {
    DriftReport d;
    if (traj.snapshots.empty()) return d;
    const auto ref = conserved_quantities(traj.snapshots.front());
    for (const auto& st : traj.snapshots) {
        const auto cq = conserved_quantities(st);
        for (std::size_t i = 0; i < cq.P.size(); ++i) d.P = std::max(d.P, std::abs(cq.P[i] - ref.P[i]));
        for (std::size_t i = 0; i < cq.Q.size(); ++i) d.Q = std::max(d.Q, std::abs(cq.Q[i] - ref.Q[i]));
        d.R = std::max(d.R, std::abs(cq.R - ref.R));
        d.S = std::max(d.S, max_abs(cq.S - ref.S));
        d.T = std::max(d.T, max_abs(cq.T - ref.T));
        d.S_minus_T = std::max(d.S_minus_T, max_abs((cq.S - cq.T) - (ref.S - ref.T)));
    }
    return d;
}

BacklundCheck backlund_consistency(const Trajectory& traj) {
    if (traj.mode != EvolutionMode::FirstOrderBacklund)
        throw ConfigError("backlund_consistency needs a first-order trajectory");
    std::span<const SpinCMState> sn = traj.snapshots;
    if (sn.size() < 3) throw ConfigError("backlund_consistency needs at least three samples");
    const double dt = sn[1].time - sn[0].time;
    // the final sample sits at t_end, usually short of a whole output step
    if (sn.back().time - sn[sn.size() - 2].time < dt * (1 - 1e-9)) sn = sn.first(sn.size() - 1);
    if (sn.size() < 3) throw ConfigError("backlund_consistency needs at least three samples");
    for (std::size_t i = 1; i < sn.size(); ++i)
        if (std::abs((sn[i].time - sn[i - 1].time) - dt) > 1e-9 * std::max(dt, 1e-300))
            throw ConfigError("backlund_consistency needs uniformly spaced samples");
    BacklundCheck out;
    double scale = 0;
    for (std::size_t i = 1; i + 1 < sn.size(); ++i) {
        const auto acc = accel(sn[i]);
        for (std::size_t j = 0; j < sn[i].N(); ++j) {
            cplx fd = (sn[i + 1].a[j] - 2.0 * sn[i].a[j] + sn[i - 1].a[j]) / (dt * dt);
            out.max_abs = std::max(out.max_abs, std::abs(fd - acc.a[j]));
            scale = std::max(scale, std::abs(acc.a[j]));
        }
        for (std::size_t k = 0; k < sn[i].M(); ++k) {
            cplx fd = (sn[i + 1].b[k] - 2.0 * sn[i].b[k] + sn[i - 1].b[k]) / (dt * dt);
            out.max_abs = std::max(out.max_abs, std::abs(fd - acc.b[k]));
            scale = std::max(scale, std::abs(acc.b[k]));
        }
        ++out.samples;
    }
    out.max_rel = scale > 0 ? out.max_abs / scale : out.max_abs;
    return out;
}

std::optional<PeriodEstimate> detect_return_period(const Trajectory& traj, std::size_t pole, double t_min,
                                                   double tolerance) {
    if (traj.dense.empty() || !traj.packer) throw ConfigError("period detection needs dense output");
    const SpinCMState s0 = traj.snapshots.front();
    if (pole >= s0.N()) throw ConfigError("pole index out of range");
    const cplx a0 = s0.a[pole], v0 = s0.adot[pole];
    const double scale = 1.0 + std::abs(a0) + std::abs(v0);

    auto dist = [&](const SpinCMState& st) { return std::hypot(std::abs(st.a[pole] - a0), std::abs(st.adot[pole] - v0)); };
    // derivative of the squared distance, up to a factor 2
    auto g = [&](double t) {
        const SpinCMState st = traj.state_at(t);
        const cplx acc = accel(st).a[pole];
        return (std::conj(st.a[pole] - a0) * st.adot[pole] + std::conj(st.adot[pole] - v0) * acc).real();
    };

    constexpr int sub = 4;
    double tp = std::max(t_min, traj.dense.front().t0);
    if (tp >= traj.dense.back().t1) return std::nullopt;
    double gp = g(tp);
    for (const auto& seg : traj.dense) {
        if (seg.t1 <= tp) continue;
        for (int k = 1; k <= sub; ++k) {
            double tc = seg.t0 + (seg.t1 - seg.t0) * k / sub;
            if (tc <= tp) continue;
            double gc = g(tc);
            if (gp < 0 && gc >= 0) {
                double lo = tp, hi = tc;
                for (int it = 0; it < 100 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
                    double mid = 0.5 * (lo + hi);
                    (g(mid) < 0 ? lo : hi) = mid;
                }
                const double tr = 0.5 * (lo + hi);
                const double d = dist(traj.state_at(tr));
                if (d < tolerance * scale) return PeriodEstimate{tr - s0.time, d};
            }
            tp = tc;
            gp = gc;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::string> trajectory_csv_header(std::size_t N, std::size_t M) {
    std::vector<std::string> h{"t"};
    auto cx = [&](const std::string& base) {
        h.push_back(base + "_re");
        h.push_back(base + "_im");
    };
    auto family = [&](const char* pole, const char* vel, const char* spin, std::size_t count) {
        for (std::size_t j = 1; j <= count; ++j) cx(pole + std::to_string(j));
        for (std::size_t j = 1; j <= count; ++j) cx(vel + std::to_string(j));
        for (std::size_t j = 1; j <= count; ++j)
            for (int c = 1; c <= 3; ++c) cx(spin + std::to_string(j) + "_" + std::to_string(c));
    };
    family("a", "adot", "s", N);
    family("b", "bdot", "t", M);
    for (int c = 1; c <= 3; ++c) cx("phi" + std::to_string(c));
    return h;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.snapshots.empty()) return;
    const auto& f = traj.snapshots.front();
    const auto head = trajectory_csv_header(f.N(), f.M());
    for (std::size_t i = 0; i < head.size(); ++i) os << (i ? "," : "") << head[i];
    os << '\n' << std::setprecision(17);
    for (const auto& st : traj.snapshots) {
        os << st.time;
        auto put = [&](cplx z) { os << ',' << z.real() << ',' << z.imag(); };
        for (cplx z : st.a) put(z);
        for (cplx z : st.adot) put(z);
        for (const auto& v : st.s)
            for (int c = 0; c < 3; ++c) put(v[c]);
        for (cplx z : st.b) put(z);
        for (cplx z : st.bdot) put(z);
        for (const auto& v : st.t)
            for (int c = 0; c < 3; ++c) put(v[c]);
        for (int c = 0; c < 3; ++c) put(st.phi[c]);
        os << '\n';
    }
}

std::vector<SpinCMState> read_trajectory_csv(std::istream& is, const SpinCMState& prototype) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("trajectory CSV is empty");
    const std::size_t N = prototype.N(), M = prototype.M();
    const auto head = trajectory_csv_header(N, M);
    {
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
        if (cols != head) throw ConfigError("trajectory CSV header does not match the state shape");
    }
    std::vector<SpinCMState> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) v.push_back(std::stod(c));
        if (v.size() != head.size()) throw ConfigError("trajectory CSV row has the wrong number of columns");
        SpinCMState st = prototype;
        std::size_t i = 0;
        st.time = v[i++];
        auto cx = [&]() {
            cplx z(v[i], v[i + 1]);
            i += 2;
            return z;
        };
        auto fam = [&](std::vector<cplx>& pole, std::vector<cplx>& vel, std::vector<CVec3>& spin, std::size_t n) {
            pole.resize(n);
            vel.resize(n);
            spin.resize(n);
            for (auto& z : pole) z = cx();
            for (auto& z : vel) z = cx();
            for (auto& s : spin)
                for (int k = 0; k < 3; ++k) s[k] = cx();
        };
        fam(st.a, st.adot, st.s, N);
        fam(st.b, st.bdot, st.t, M);
        for (int k = 0; k < 3; ++k) st.phi[k] = cx();
        out.push_back(std::move(st));
    }
    return out;
}

}  // namespace ncihf

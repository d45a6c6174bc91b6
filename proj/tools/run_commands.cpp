#include "run_commands.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "ncihf/analysis.hpp"
#include "ncihf/ansatz.hpp"
#include "ncihf/errors.hpp"
#include "ncihf/initialdata.hpp"
#include "ncihf/integrator.hpp"
#include "ncihf/pde_oracle.hpp"
#include "ncihf/state_io.hpp"
#include "ncihf/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ncihf::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json cj(cplx z) { return json::array({z.real(), z.imag()}); }
json vj(const CVec3& v) { return json::array({cj(v[0]), cj(v[1]), cj(v[2])}); }

// Collects output files and timings; written last so every listed file exists.
class Manifest {
public:
    Manifest(std::string command, const Options& o) : dir_(o.out) {
        j_["command"] = std::move(command);
        j_["tool_version"] = NCIHF_VERSION;
        j_["tolerances"] = {{"rel_tol", o.tol}, {"abs_tol", o.tol * 1e-2}};
        j_["grid_n"] = o.grid_n;
        j_["method"] = o.method;
        j_["outputs"] = json::array();
        fs::create_directories(dir_);
    }

    fs::path path(const std::string& name) const { return dir_ / name; }

    std::ofstream open(const std::string& name) {
        std::ofstream os(path(name));
        if (!os) throw std::runtime_error("cannot write '" + path(name).string() + "'");
        j_["outputs"].push_back(name);
        return os;
    }

    void write_text(const std::string& name, const std::string& text) { open(name) << text << '\n'; }
    void timing(const std::string& key, double s) { j_["timings_s"][key] = s; }
    json& operator[](const std::string& k) { return j_[k]; }

    void finish() {
        std::ofstream os(path("manifest.json"));
        os << j_.dump(2) << '\n';
        spdlog::info("wrote {}", path("manifest.json").string());
    }

private:
    fs::path dir_;
    json j_;
};

IntegratorConfig integrator_config(const Options& o, bool real_mode) {
    IntegratorConfig c;
    c.rel_tol = o.tol;
    c.abs_tol = o.tol * 1e-2;
    c.real_mode = real_mode;
    c.output_dt = o.output_dt;
    c.keep_dense = true;
    c.validate();
    return c;
}

json drift_json(const DriftReport& d) {
    return {{"P", d.P}, {"Q", d.Q}, {"R", d.R}, {"S", d.S}, {"T", d.T}, {"S_minus_T", d.S_minus_T}, {"max", d.max()}};
}

json constraints_json(const ConstraintReport& r) {
    return {{"null_spin", r.null_spin},         {"orthogonality", r.orthogonality},
            {"spin_balance", r.spin_balance},   {"background", r.background},
            {"strip_margin", r.strip_margin},   {"min_separation", r.min_separation},
            {"min_spin_norm", r.min_spin_norm}, {"max_residual", r.max_residual()}};
}

// Fields at the requested times, with energy columns when the state is a real reduction.
void write_fields(Manifest& man, const Trajectory& traj, const std::vector<double>& times, std::size_t grid_n) {
    json list = json::array();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto st = traj.state_at(times[k]);
        const auto grid = periodic_grid(st.params.ell(), grid_n);
        auto f = eval_field(st, grid);
        if (real_reduction_defect(st) <= 1e-8) {
            auto e = energy_density(st, grid);
            f.eps_u = std::move(e.eps_u);
            f.eps_v = std::move(e.eps_v);
        }
        const std::string name = "fields_" + std::to_string(k) + ".csv";
        auto os = man.open(name);
        write_field_csv(os, f);
        list.push_back({{"file", name}, {"t", times[k]}});
    }
    man["field_files"] = list;
}

void write_energy(Manifest& man, const Trajectory& traj, const std::vector<double>& times, std::size_t grid_n) {
    auto os = man.open("energy.csv");
    os << "t,x,eps_u,eps_v,eps_total\n" << std::setprecision(17);
    json totals = json::array();
    for (double t : times) {
        const auto st = traj.state_at(t);
        const auto grid = periodic_grid(st.params.ell(), grid_n);
        const auto e = energy_density(st, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            os << t << ',' << grid[i] << ',' << e.eps_u[i] << ',' << e.eps_v[i] << ',' << e.eps_u[i] + e.eps_v[i]
               << '\n';
        totals.push_back({{"t", t}, {"H", e.H}});
    }
    man["energy_totals"] = totals;
}

std::vector<double> spaced(double t0, double dt, std::size_t count, double t_max) {
    std::vector<double> out;
    for (std::size_t k = 0; k < count; ++k) {
        const double t = t0 + dt * static_cast<double>(k);
        if (t <= t_max + 1e-12) out.push_back(std::min(t, t_max));
    }
    return out;
}

// Shared pipeline: integrate, export, analyse. Returns the exit code.
int run_family(Manifest& man, const SpinCMState& st0, const Options& o, bool real_mode, bool periodic_family) {
    auto t0 = Clock::now();
    const auto admission = constraint_residuals(st0);
    man["initial_constraints"] = constraints_json(admission);
    man["phi0"] = vj(st0.phi);
    man.write_text("initial_state.json", state_to_json(st0, 2));

    const double t_end = o.t_end.value_or(12.0);
    const auto cfg = integrator_config(o, real_mode);
    spdlog::info("integrating to t = {} (rel_tol {}, real mode {})", t_end, cfg.rel_tol, real_mode);
    const auto traj = integrate(st0, t_end, cfg);
    man.timing("integrate", seconds_since(t0));
    man["termination"] = {{"reason", to_string(traj.reason)},
                          {"message", traj.message},
                          {"t_final", traj.t_end()},
                          {"accepted_steps", traj.accepted},
                          {"rejected_steps", traj.rejected}};
    if (traj.reason != Termination::TimeLimit)
        spdlog::warn("integration stopped at t = {}: {} ({})", traj.t_end(), to_string(traj.reason), traj.message);

    t0 = Clock::now();
    {
        auto os = man.open("trajectory.csv");
        write_trajectory_csv(os, traj);
    }
    man.write_text("trajectory.json", trajectory_to_json(traj));
    const auto drift = conservation_drift(traj);
    man.write_text("drift.json", drift_json(drift).dump(2));
    man["drift"] = drift_json(drift);

    std::optional<double> period;
    if (periodic_family) {
        // the pole with the largest initial speed carries the oscillation
        std::size_t pole = 0;
        for (std::size_t j = 1; j < st0.N(); ++j)
            if (std::abs(st0.adot[j]) > std::abs(st0.adot[pole])) pole = j;
        if (st0.N() > 0 && std::abs(st0.adot[pole]) > 0) {
            if (auto pe = detect_return_period(traj, pole, 1.0)) {
                period = pe->period;
                man["pole_period"] = {{"pole_index", pole}, {"period", pe->period},
                                      {"return_distance", pe->return_distance}};
                spdlog::info("pole period {:.6f}", pe->period);
            }
        }
        if (!period) man["pole_period"] = nullptr;
    }

    const double span = traj.t_end() - traj.t_begin();
    const double field_dt = (period ? *period : span) / 8.0;
    write_fields(man, traj, spaced(traj.t_begin(), field_dt, 8, traj.t_end()), o.grid_n);

    const bool real_reduction = real_reduction_defect(st0) <= 1e-8;
    if (real_reduction) {
        std::vector<double> times = spaced(traj.t_begin(), field_dt, 9, traj.t_end());
        write_energy(man, traj, times, o.grid_n);
        if (period && traj.t_end() >= 0.6 * *period) {
            auto ep = energy_return_period(traj, traj.t_begin(), 0.3 * *period, 0.7 * *period, 256);
            if (ep) {
                man["energy_period"] = {{"period", ep->period}, {"mismatch", ep->mismatch}};
                spdlog::info("total energy period {:.6f}", ep->period);
            }
        }
        if (period) {
            json kinks = json::array();
            for (double t : breather_kink_times(*period, traj.t_end())) kinks.push_back(t);
            man["kink_times"] = kinks;
        }
    }
    man.timing("export", seconds_since(t0));
    return ExitCode::ok;
}

}  // namespace

int cmd_validate(const Options& o) {
    ValidationOptions vo;
    vo.perturb = o.perturb;
    vo.grid_n = o.grid_n;
    const auto t0 = Clock::now();
    const auto checks = run_validation(vo);
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.pass;
        if (!c.pass) spdlog::error("check {} failed: {:.3e} > {:.1e}", c.name, c.value, c.tolerance);
    }
    Manifest man("validate", o);
    man.write_text("validate.json", validation_report_json(checks));
    man["all_pass"] = all;
    man.timing("total", seconds_since(t0));
    man.finish();
    std::cout << validation_report_json(checks) << '\n';
    return all ? ExitCode::ok : ExitCode::check_failure;
}

int cmd_breather(const Options& o) {
    const auto t0 = Clock::now();
    Manifest man("breather", o);
    const auto cfg = JacobiConfig::breather();
    man["config"] = json::parse(config_to_json(cfg));
    const auto st0 = jacobi_state(cfg);
    const int rc = run_family(man, st0, o, true, true);
    man.timing("total", seconds_since(t0));
    man.finish();
    return rc;
}

int cmd_jacobi(const Options& o) {
    const auto t0 = Clock::now();
    Manifest man("jacobi", o);
    const auto cfg = o.config.empty() ? JacobiConfig::breather() : jacobi_config_from_json(read_file(o.config));
    man["config"] = json::parse(config_to_json(cfg));
    const auto data = jacobi_data(cfg);
    man["pole_strip_margin"] = data.strip_margin;
    man["phi_solve_defect"] = data.phi_solve_defect;
    const int rc = run_family(man, data.state, o, true, true);
    man.timing("total", seconds_since(t0));
    man.finish();
    return rc;
}

int cmd_traveling_wave(const Options& o) {
    const auto t0 = Clock::now();
    Manifest man("traveling-wave", o);
    TravelingWaveConfig cfg;
    if (!o.config.empty()) {
        cfg = traveling_wave_config_from_json(read_file(o.config));
    } else {
        cfg.a0 = {cplx(0.0, cfg.delta)};
        cfg.b0 = {cplx(0.0, -cfg.delta)};
    }
    man["config"] = json::parse(config_to_json(cfg));
    const auto st0 = traveling_wave_state(cfg);
    const bool real = o.real_mode && real_reduction_defect(st0) <= 1e-12;
    if (o.real_mode && !real) spdlog::warn("initial state is not a real reduction; integrating both families");
    const int rc = run_family(man, st0, o, real, false);
    man.timing("total", seconds_since(t0));
    man.finish();
    return rc;
}

int cmd_residual(const Options& o) {
    if (o.in.empty()) throw ConfigError("residual needs --in <run directory>");
    const fs::path dir(o.in);
    auto states = trajectory_states_from_json(read_file((dir / "trajectory.json").string()));
    if (states.empty()) throw ConfigError("trajectory.json has no states");

    ResidualOptions ropt;
    const fs::path mpath = dir / "manifest.json";
    if (fs::exists(mpath)) {
        const auto m = json::parse(read_file(mpath.string()));
        if (m.contains("kink_times"))
            for (const auto& t : m["kink_times"]) ropt.excluded_times.push_back(t.get<double>());
    }

    std::vector<const SpinCMState*> picked;
    if (o.times.empty()) {
        for (const auto& s : states) picked.push_back(&s);
    } else {
        for (double t : o.times) {
            const SpinCMState* best = &states.front();
            for (const auto& s : states)
                if (std::abs(s.time - t) < std::abs(best->time - t)) best = &s;
            picked.push_back(best);
        }
    }

    const OperatorEvaluator ops(states.front().params, o.grid_n, operator_method_from_string(o.method));
    json reports = json::array();
    double worst = 0;
    for (const auto* s : picked) {
        SpinCMState st = *s;
        if (o.perturb != 0 && st.N() > 0) st.s[0][0] += o.perturb;
        const auto r = pde_residual(st, ops, ropt);
        reports.push_back(json::parse(r.to_json()));
        if (!r.excluded) worst = std::max(worst, r.max_residual);
        spdlog::debug("t = {:.6f}: residual {:.3e}{}", r.time, r.max_residual, r.excluded ? " (excluded)" : "");
    }
    const bool pass = worst <= o.threshold;
    json out{{"run_dir", o.in}, {"threshold", o.threshold}, {"max_residual", worst}, {"pass", pass},
             {"perturb", o.perturb}, {"reports", reports}};
    std::ofstream os(dir / "residual.json");
    os << out.dump(2) << '\n';
    std::cout << "max residual " << worst << (pass ? " (pass)" : " (FAIL)") << '\n';
    return pass ? ExitCode::ok : ExitCode::check_failure;
}

}  // namespace ncihf::cli

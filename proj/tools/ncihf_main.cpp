// ncihf: construct, evolve and certify spin-pole solutions from the command line.
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "ncihf/errors.hpp"
#include "run_commands.hpp"

namespace {

void set_log_level() {
    const char* env = std::getenv("NCIHF_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    spdlog::set_pattern("[%l] %v");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace ncihf::cli;
    set_log_level();

    CLI::App app{"Pole-dynamics solver and residual certifier for the periodic ncIHF equation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(NCIHF_VERSION));

    Options opt;
    auto common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--t-end", opt.t_end, "final time");
        sub->add_option("--tol", opt.tol, "relative integration tolerance (absolute is tol/100)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--grid-n", opt.grid_n, "spatial grid points")->check(CLI::Range(8, 1 << 16));
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--method", opt.method, "operator discretisation")
            ->check(CLI::IsMember({"pv", "spectral"}));
        sub->add_option("--perturb", opt.perturb, "fault injection amplitude");
        sub->add_flag("--real-mode", opt.real_mode, "evolve the a-family only (b = a*, t = s*)");
        sub->add_option("--dt", opt.output_dt, "snapshot spacing in the exported trajectory")
            ->check(CLI::NonNegativeNumber);
    };

    auto* validate = app.add_subcommand("validate", "run the identity and property battery");
    auto* breather = app.add_subcommand("breather", "evolve the p = q = 1, m = 1/2 breather");
    auto* tw = app.add_subcommand("traveling-wave", "evolve a sum of two traveling waves");
    auto* jacobi = app.add_subcommand("jacobi", "evolve Jacobi-curve initial data");
    auto* residual = app.add_subcommand("residual", "certify field-equation residuals of an exported run");
    for (auto* s : {validate, breather, tw, jacobi, residual}) common(s);
    residual->add_option("--in", opt.in, "run directory containing trajectory.json")->required();
    residual->add_option("--times", opt.times, "times to certify (nearest exported snapshot)");
    residual->add_option("--threshold", opt.threshold, "pass threshold on the max residual");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ExitCode::ok : ExitCode::usage_error;
    }

    try {
        if (*validate) return cmd_validate(opt);
        if (*breather) return cmd_breather(opt);
        if (*tw) return cmd_traveling_wave(opt);
        if (*jacobi) return cmd_jacobi(opt);
        if (*residual) return cmd_residual(opt);
    } catch (const ncihf::ConfigError& e) {
        spdlog::error("{}", e.what());
        std::cerr << "error: " << e.what() << '\n';
        return ExitCode::usage_error;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        std::cerr << "error: " << e.what() << '\n';
        return ExitCode::check_failure;
    }
    return ExitCode::usage_error;
}

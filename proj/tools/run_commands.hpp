#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ncihf::cli {

enum ExitCode : int { ok = 0, check_failure = 1, usage_error = 2 };

struct Options {
    std::string config;  // JSON config file, family-specific
    std::optional<double> t_end;
    double tol = 1e-10;
    std::size_t grid_n = 512;
    std::string out = "ncihf_out";
    std::string method = "pv";
    double perturb = 0;
    bool real_mode = false;
    double output_dt = 0.05;
    // residual command
    std::string in;
    std::vector<double> times;
    double threshold = 1e-6;
};

int cmd_validate(const Options& o);
int cmd_breather(const Options& o);
int cmd_traveling_wave(const Options& o);
int cmd_jacobi(const Options& o);
int cmd_residual(const Options& o);

}  // namespace ncihf::cli

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ncihf {

struct CheckResult {
    std::string name;
    double value = 0;      // worst error observed
    double tolerance = 0;  // pass when value <= tolerance
    bool pass = false;
    std::string detail;
};

struct ValidationOptions {
    double ell = 1.0;
    double delta = 1.0;
    int samples = 100;
    double perturb = 0;  // fault injection: adds perturb * z^2 to every zeta2 value the battery sees
    std::uint64_t seed = 20220516;
    std::size_t grid_n = 512;
};

// Identity and property battery over the special functions, the two-vector product rules,
// the operator eigenrelation and the breather constraints.
std::vector<CheckResult> run_validation(const ValidationOptions& opt = {});

std::string validation_report_json(const std::vector<CheckResult>& checks, int indent = 2);

}  // namespace ncihf

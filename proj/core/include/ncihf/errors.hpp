#pragma once

#include <stdexcept>
#include <string>

namespace ncihf {

// Argument came within the pole guard of a lattice point (or a Jacobi pole).
struct PoleError : std::domain_error {
    using std::domain_error::domain_error;
};

// Parameters outside the admissible range (m outside (0,1), non-positive periods, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Two poles of one family coincide modulo the lattice, or a mixed pole argument hits it.
struct CollisionError : std::domain_error {
    using std::domain_error::domain_error;
};

// A spin with vanishing Hermitian norm where a division by it is required.
struct ZeroSpinError : std::domain_error {
    using std::domain_error::domain_error;
};

// State fails the strip condition or another admissibility requirement.
struct InadmissibleState : std::domain_error {
    using std::domain_error::domain_error;
};

// Configuration file or flags that cannot be turned into a valid object.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace ncihf

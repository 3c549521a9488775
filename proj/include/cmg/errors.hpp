#pragma once

#include <stdexcept>
#include <string>

namespace cmg {

// Invalid attribute schema or a vector that does not fit it.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed game-spec document or run configuration.
struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
};

// Infeasible instance layout (e.g. structured generator with too few attributes).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Semantically invalid query, e.g. posterior of a zero-probability observation.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Enumeration cap exceeded; the exact path refuses rather than degrades.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// LP backend failure or constraint generation not converging.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric divergence during gradient training; carries the iteration index.
struct TrainingError : std::runtime_error {
    TrainingError(const std::string& msg, int iteration)
        : std::runtime_error(msg), iteration(iteration) {}
    int iteration;
};

}  // namespace cmg

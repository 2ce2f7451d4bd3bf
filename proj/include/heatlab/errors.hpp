#pragma once
#include <stdexcept>
#include <string>

namespace heatlab {

// Thrown for malformed inputs: bad dimensions, schema violations, unknown names.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SingularMetricError : std::runtime_error {
    explicit SingularMetricError(const std::string& what) : std::runtime_error(what) {}
};

struct MissingJetError : std::runtime_error {
    explicit MissingJetError(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical contract failed: ambiguous spectral gap, unreliable t-window,
// ill-conditioned fit design. Carries diagnostics in the message.
struct NumericalContractError : std::runtime_error {
    explicit NumericalContractError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace heatlab

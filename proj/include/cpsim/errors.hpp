#pragma once

#include <stdexcept>
#include <string>

namespace cpsim {

/// Malformed input: bad graph structure, unknown slice reference,
/// length mismatch, invalid config value.
class StructuralError : public std::runtime_error {
public:
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

/// Config file cannot be used: missing section, unknown key, wrong type.
class ConfigError : public StructuralError {
public:
    explicit ConfigError(const std::string& what) : StructuralError(what) {}
};

/// A requested solve/run has no feasible answer, or its preconditions
/// (capacity totals, placement feasibility) provably fail.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cpsim

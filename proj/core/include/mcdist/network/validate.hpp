#pragma once

#include <string>
#include <vector>

#include "mcdist/network/types.hpp"

namespace mcdist::network {

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string component;
    std::string rule;
    std::string message;
};

/// Empty iff every Network invariant holds. Floating buses yield a warning.
std::vector<Diagnostic> validate(const Network& net);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace mcdist::network

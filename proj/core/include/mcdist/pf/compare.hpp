#pragma once

#include <set>
#include <string>
#include <vector>

#include "mcdist/pf/solution.hpp"

namespace mcdist::pf {

struct DeltaEntry {
    std::string bus;
    std::string tag;  ///< phase "a" or phase pair "ab" at floating buses
    double magnitude_a = 0.0;
    double magnitude_b = 0.0;
    double relative = 0.0;
};

struct DeltaReport {
    double delta = 0.0;
    /// Every compared magnitude, largest relative difference first.
    std::vector<DeltaEntry> entries;
};

/// Largest relative difference of voltage magnitudes, |(|U|a - |U|b)/|U|b|.
/// Floating buses compare phase-to-phase magnitudes. Throws ModelError when
/// the bus or phase sets differ.
DeltaReport compare_report(const PfSolution& a, const PfSolution& b, const std::set<std::string>& floating = {});

double compare_delta(const PfSolution& a, const PfSolution& b, const std::set<std::string>& floating = {});

}  // namespace mcdist::pf

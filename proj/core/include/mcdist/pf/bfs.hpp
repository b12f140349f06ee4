#pragma once

#include "mcdist/network/types.hpp"
#include "mcdist/pf/solution.hpp"

namespace mcdist::pf {

struct BfsOptions {
    double tolerance = 1e-11;  ///< max voltage change between sweeps, pu
    int max_iterations = 1000;
};

/// Backward current / forward voltage sweep over the radial tree rooted at
/// the slack. Throws UnsupportedError for meshed networks and for
/// transformers whose ratio matrix cannot be inverted in the downstream
/// direction.
PfSolution solve_bfs(const network::Network& net, const BfsOptions& options = {});

}  // namespace mcdist::pf

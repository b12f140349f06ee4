#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcdist/network/types.hpp"

namespace mcdist::network {

enum class EdgeKind { Branch, Transformer };

/// An in-service edge of the bus graph oriented away from the slack.
struct TreeEdge {
    EdgeKind kind;
    int index;         ///< into branches or transformers
    int parent_bus;    ///< bus index nearer the slack
    int child_bus;
    bool reversed;     ///< child is the element's f_bus
};

/// Breadth-first spanning structure rooted at the slack bus.
struct Tree {
    std::vector<int> order;  ///< bus indices, parents before children
    std::vector<int> parent_edge;  ///< per bus, index into edges or -1
    std::vector<TreeEdge> edges;
};

/// Bus ids of one cycle among in-service edges, if any.
std::optional<std::vector<std::string>> find_cycle(const Network& net);

/// Throws UnsupportedError naming the cycle when the network is meshed.
void require_radial(const Network& net, const std::string& method);

/// Spanning tree from the slack; buses not reached are absent from `order`.
Tree build_tree(const Network& net);

/// Connected components over in-service edges, as lists of bus indices.
std::vector<std::vector<int>> islands(const Network& net);

/// Mark buses whose phase-to-neutral potential is not fixed by any path to
/// a grounded reference.
void mark_floating(Network& net);

}  // namespace mcdist::network

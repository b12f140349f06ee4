#include "mcdist/network/topology.hpp"

#include <algorithm>
#include <deque>

#include "mcdist/common/errors.hpp"

namespace mcdist::network {

namespace {

struct Adjacent {
    int bus;
    int edge;
};

struct Graph {
    std::vector<TreeEdge> edges;  ///< parent/child here are simply f/t
    std::vector<std::vector<Adjacent>> adj;
};

Graph build_graph(const Network& net) {
    Graph g;
    g.adj.resize(net.buses.size());
    auto add = [&](EdgeKind kind, int index, const std::string& f, const std::string& t) {
        const int a = net.bus_index(f);
        const int b = net.bus_index(t);
        const int e = static_cast<int>(g.edges.size());
        g.edges.push_back({kind, index, a, b, false});
        g.adj[static_cast<std::size_t>(a)].push_back({b, e});
        g.adj[static_cast<std::size_t>(b)].push_back({a, e});
    };
    for (std::size_t i = 0; i < net.branches.size(); ++i) {
        const auto& br = net.branches[i];
        if (br.status) add(EdgeKind::Branch, static_cast<int>(i), br.f_bus, br.t_bus);
    }
    for (std::size_t i = 0; i < net.transformers.size(); ++i) {
        const auto& tr = net.transformers[i];
        if (tr.status) add(EdgeKind::Transformer, static_cast<int>(i), tr.f_bus, tr.t_bus);
    }
    return g;
}

}  // namespace

std::optional<std::vector<std::string>> find_cycle(const Network& net) {
    const Graph g = build_graph(net);
    const std::size_t n = net.buses.size();
    std::vector<int> parent(n, -1), parent_edge(n, -1);
    std::vector<bool> seen(n, false);
    for (std::size_t root = 0; root < n; ++root) {
        if (seen[root]) continue;
        seen[root] = true;
        std::vector<int> stack{static_cast<int>(root)};
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto& [v, e] : g.adj[static_cast<std::size_t>(u)]) {
                if (e == parent_edge[static_cast<std::size_t>(u)]) continue;
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = true;
                    parent[static_cast<std::size_t>(v)] = u;
                    parent_edge[static_cast<std::size_t>(v)] = e;
                    stack.push_back(v);
                    continue;
                }
                // u-v closes a cycle: join the two root paths at their common ancestor
                std::vector<int> pu{u}, pv{v};
                for (int x = u; parent[static_cast<std::size_t>(x)] >= 0; x = parent[static_cast<std::size_t>(x)])
                    pu.push_back(parent[static_cast<std::size_t>(x)]);
                for (int x = v; parent[static_cast<std::size_t>(x)] >= 0; x = parent[static_cast<std::size_t>(x)])
                    pv.push_back(parent[static_cast<std::size_t>(x)]);
                while (pu.size() > 1 && pv.size() > 1 && pu[pu.size() - 2] == pv[pv.size() - 2]) {
                    pu.pop_back();
                    pv.pop_back();
                }
                std::vector<std::string> cycle;
                for (int x : pu) cycle.push_back(net.buses[static_cast<std::size_t>(x)].id);
                for (auto it = pv.rbegin() + 1; it != pv.rend(); ++it) {
                    cycle.push_back(net.buses[static_cast<std::size_t>(*it)].id);
                }
                if (pu.size() == 1 && pv.size() == 1) cycle.push_back(net.buses[static_cast<std::size_t>(v)].id);
                return cycle;
            }
        }
    }
    return std::nullopt;
}

void require_radial(const Network& net, const std::string& method) {
    if (auto cycle = find_cycle(net)) {
        std::string text;
        for (const auto& id : *cycle) text += id + " -> ";
        text += cycle->front();
        throw UnsupportedError(method + ": radial required (network is meshed); found cycle " + text);
    }
}

Tree build_tree(const Network& net) {
    const Graph g = build_graph(net);
    Tree tree;
    tree.parent_edge.assign(net.buses.size(), -1);
    std::vector<bool> seen(net.buses.size(), false);
    const int root = net.bus_index(net.slack().id);
    std::deque<int> queue{root};
    seen[static_cast<std::size_t>(root)] = true;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        tree.order.push_back(u);
        for (const auto& [v, e] : g.adj[static_cast<std::size_t>(u)]) {
            if (seen[static_cast<std::size_t>(v)]) continue;
            seen[static_cast<std::size_t>(v)] = true;
            TreeEdge te = g.edges[static_cast<std::size_t>(e)];
            te.reversed = te.parent_bus != u;
            te.parent_bus = u;
            te.child_bus = v;
            tree.parent_edge[static_cast<std::size_t>(v)] = static_cast<int>(tree.edges.size());
            tree.edges.push_back(te);
            queue.push_back(v);
        }
    }
    return tree;
}

std::vector<std::vector<int>> islands(const Network& net) {
    const Graph g = build_graph(net);
    std::vector<bool> seen(net.buses.size(), false);
    std::vector<std::vector<int>> out;
    for (std::size_t s = 0; s < net.buses.size(); ++s) {
        if (seen[s]) continue;
        std::vector<int> island;
        std::deque<int> queue{static_cast<int>(s)};
        seen[s] = true;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            island.push_back(u);
            for (const auto& [v, e] : g.adj[static_cast<std::size_t>(u)]) {
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = true;
                    queue.push_back(v);
                }
            }
        }
        std::sort(island.begin(), island.end());
        out.push_back(std::move(island));
    }
    return out;
}

void mark_floating(Network& net) {
    net.index();
    const std::size_t n = net.buses.size();
    std::vector<bool> pinned(n, false), reached(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (net.buses[i].type == BusType::Slack) pinned[i] = reached[i] = true;
    }
    bool changed = true;
    while (changed) {
        changed = false;
        auto mark = [&](std::vector<bool>& flags, int i) {
            if (!flags[static_cast<std::size_t>(i)]) {
                flags[static_cast<std::size_t>(i)] = true;
                changed = true;
            }
        };
        for (const auto& br : net.branches) {
            if (!br.status) continue;
            const int a = net.bus_index(br.f_bus), b = net.bus_index(br.t_bus);
            for (auto* flags : {&pinned, &reached}) {
                if ((*flags)[static_cast<std::size_t>(a)]) mark(*flags, b);
                if ((*flags)[static_cast<std::size_t>(b)]) mark(*flags, a);
            }
        }
        for (const auto& tr : net.transformers) {
            if (!tr.status) continue;
            const int f = net.bus_index(tr.f_bus), t = net.bus_index(tr.t_bus);
            if (reached[static_cast<std::size_t>(f)]) mark(reached, t);
            if (reached[static_cast<std::size_t>(t)]) mark(reached, f);
            // U_f = T U_t fixes the f side; the t side only when T is invertible
            if (pinned[static_cast<std::size_t>(t)]) mark(pinned, f);
            if (pinned[static_cast<std::size_t>(f)] && tr.same_config()) mark(pinned, t);
        }
    }
    for (std::size_t i = 0; i < n; ++i) net.buses[i].floating = reached[i] && !pinned[i];
}

}  // namespace mcdist::network

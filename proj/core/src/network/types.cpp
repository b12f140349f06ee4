#include "mcdist/network/types.hpp"

#include <algorithm>

#include "mcdist/common/errors.hpp"

namespace mcdist::network {

int Bus::index_of(int phase) const {
    auto it = std::find(phases.begin(), phases.end(), phase);
    return it == phases.end() ? -1 : static_cast<int>(it - phases.begin());
}

void Network::index() {
    bus_lookup_.clear();
    for (std::size_t i = 0; i < buses.size(); ++i) bus_lookup_[buses[i].id] = static_cast<int>(i);
}

const Bus* Network::find_bus(const std::string& id) const {
    if (bus_lookup_.size() != buses.size()) {
        for (const auto& b : buses) {
            if (b.id == id) return &b;
        }
        return nullptr;
    }
    auto it = bus_lookup_.find(id);
    return it == bus_lookup_.end() ? nullptr : &buses[static_cast<std::size_t>(it->second)];
}

const Bus& Network::bus(const std::string& id) const {
    const Bus* b = find_bus(id);
    if (!b) throw ModelError("unknown bus '" + id + "'");
    return *b;
}

int Network::bus_index(const std::string& id) const {
    if (bus_lookup_.size() != buses.size()) {
        for (std::size_t i = 0; i < buses.size(); ++i) {
            if (buses[i].id == id) return static_cast<int>(i);
        }
        throw ModelError("unknown bus '" + id + "'");
    }
    auto it = bus_lookup_.find(id);
    if (it == bus_lookup_.end()) throw ModelError("unknown bus '" + id + "'");
    return it->second;
}

const Bus& Network::slack() const {
    for (const auto& b : buses) {
        if (b.type == BusType::Slack) return b;
    }
    throw ModelError("network has no slack bus");
}

}  // namespace mcdist::network

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcdist/dss/statement.hpp"
#include "mcdist/dss/value.hpp"

namespace mcdist::dss {

struct DssObject {
    /// Display name as first written; lookups use the lowercased key.
    std::string name;
    std::map<std::string, DssValue> properties;

    const DssValue* find(const std::string& key) const;
    bool has(const std::string& key) const { return find(key) != nullptr; }

    double number(const std::string& key, double fallback) const;
    std::string text(const std::string& key, const std::string& fallback = {}) const;
    std::optional<BusSpec> bus(const std::string& key) const;
    std::optional<SymMatrix> matrix(const std::string& key) const;
    NumberArray numbers(const std::string& key) const;
    TextArray texts(const std::string& key) const;

    bool operator==(const DssObject&) const = default;
};

struct DssDataModel {
    /// class -> lowercased object name -> object
    std::map<std::string, std::map<std::string, DssObject>> objects;
    std::map<std::string, DssValue> options;
    std::vector<std::pair<std::string, std::string>> source_order;
    /// Diagnostics only; not part of model identity.
    std::vector<std::string> warnings;

    const DssObject* find(const std::string& object_class, const std::string& name) const;
    std::size_t count(const std::string& object_class) const;

    bool operator==(const DssDataModel& other) const {
        return objects == other.objects && options == other.options &&
               source_order == other.source_order;
    }
};

/// Apply New/Edit/Set semantics, `like=` inheritance and value typing.
/// `New Circuit.x` defines `vsource.source`, as OpenDSS does.
DssDataModel build_data_model(const std::vector<DssStatement>& statements);

}  // namespace mcdist::dss

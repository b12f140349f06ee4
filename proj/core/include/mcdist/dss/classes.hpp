#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcdist/dss/value.hpp"

namespace mcdist::dss {

struct PropertyDef {
    std::string_view name;
    ValueKind kind;
};

/// Property whitelist for one supported DSS class, in OpenDSS positional order.
struct ClassDef {
    std::string_view name;
    std::vector<PropertyDef> properties;

    /// Index of `name` in the positional order, or -1.
    int index_of(std::string_view name) const;
    const PropertyDef* find(std::string_view name) const;
};

/// nullptr for classes that are stored raw and not converted downstream.
const ClassDef* find_class(std::string_view object_class);

std::span<const std::string_view> supported_classes();

/// Resolve a (possibly abbreviated) property key against the class table.
/// Exact matches win; a unique prefix is expanded; an ambiguous prefix
/// throws ParseError. Unknown keys are returned unchanged with `known=false`.
struct ResolvedKey {
    std::string name;
    bool known = false;
};
ResolvedKey resolve_property(const ClassDef& cls, std::string_view key);

/// Transformer properties that apply to the active winding (`wdg=`).
bool is_winding_property(std::string_view key);
/// Array form of a winding property ("kv" -> "kvs"), or empty.
std::string_view winding_array_name(std::string_view key);
/// Per-winding key for an array form ("kvs" -> "kv"), or empty.
std::string_view winding_scalar_name(std::string_view array_key);

}  // namespace mcdist::dss

#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mcdist/dss/matrix.hpp"

namespace mcdist::dss {

/// "632.1.2.3" -> {"632", {1, 2, 3}}. Terminal 0 is ground.
struct BusSpec {
    std::string name;
    std::vector<int> terminals;

    static BusSpec parse(std::string_view text);
    std::string str() const;
    bool operator==(const BusSpec&) const = default;
};

using NumberArray = std::vector<double>;
using TextArray = std::vector<std::string>;
using DssValue = std::variant<double, std::string, NumberArray, TextArray, SymMatrix, BusSpec>;

enum class ValueKind { Number, Text, NumberArray, TextArray, Matrix, Bus };

/// Type a raw property value. `matrix_size` is used only for matrix
/// literals without row delimiters.
DssValue parse_value(ValueKind kind, std::string_view raw, std::size_t matrix_size);

/// Render a value back to DSS syntax; parse_value(kind_of(v), format_value(v))
/// reproduces `v` exactly.
std::string format_value(const DssValue& value);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

}  // namespace mcdist::dss

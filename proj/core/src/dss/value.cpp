#include "mcdist/dss/value.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "mcdist/common/errors.hpp"
#include "mcdist/dss/rpn.hpp"
#include "mcdist/dss/statement.hpp"

namespace mcdist::dss {

namespace {

std::string_view strip_quotes(std::string_view text) {
    text = trim(text);
    if (text.size() >= 2 && (text.front() == '"' || text.front() == '\'') && text.back() == text.front()) {
        return text.substr(1, text.size() - 2);
    }
    return text;
}

bool needs_quotes(std::string_view text) {
    if (text.empty()) return true;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == ',' || c == '=' || c == '!' || c == '"' || c == '\'' || c == '|') return true;
    }
    if (text.find("//") != std::string_view::npos) return true;
    const char f = text.front();
    return f == '[' || f == '(' || f == '{' || f == '~';
}

std::string quote_text(std::string_view text) {
    if (!needs_quotes(text)) return std::string(text);
    const char q = text.find('"') == std::string_view::npos ? '"' : '\'';
    if (text.find(q) != std::string_view::npos) {
        throw ParseError("text value contains both quote characters: " + std::string(text));
    }
    return q + std::string(text) + q;
}

std::size_t infer_matrix_size(std::string_view raw, std::size_t fallback) {
    std::size_t rows = matrix_row_count(raw);
    if (rows > 1) return rows;
    if (split_items(strip_delimiters(raw)).size() == 1) return 1;
    return fallback;
}

}  // namespace

BusSpec BusSpec::parse(std::string_view text) {
    text = strip_quotes(text);
    if (text.empty()) throw ParseError("empty bus name");
    BusSpec spec;
    auto dot = text.find('.');
    spec.name = std::string(text.substr(0, dot));
    if (spec.name.empty()) throw ParseError("bus spec '" + std::string(text) + "' has no name");
    while (dot != std::string_view::npos) {
        auto next = text.find('.', dot + 1);
        std::string_view part = text.substr(dot + 1, next == std::string_view::npos ? std::string_view::npos : next - dot - 1);
        int terminal = -1;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), terminal);
        if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || terminal < 0) {
            throw ParseError("bad terminal '" + std::string(part) + "' in bus spec '" + std::string(text) + "'");
        }
        spec.terminals.push_back(terminal);
        dot = next;
    }
    return spec;
}

std::string BusSpec::str() const {
    std::string out = name;
    for (int t : terminals) out += "." + std::to_string(t);
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) throw ParseError("cannot format NaN");
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

DssValue parse_value(ValueKind kind, std::string_view raw, std::size_t matrix_size) {
    switch (kind) {
        case ValueKind::Number:
            return parse_number(raw);
        case ValueKind::Text:
            return std::string(strip_quotes(raw));
        case ValueKind::NumberArray: {
            NumberArray out;
            for (const auto& item : split_items(strip_delimiters(raw))) out.push_back(parse_number(item));
            return out;
        }
        case ValueKind::TextArray: {
            TextArray out;
            for (const auto& item : split_items(strip_delimiters(raw))) out.emplace_back(strip_quotes(item));
            return out;
        }
        case ValueKind::Matrix:
            return parse_matrix(raw, infer_matrix_size(raw, matrix_size));
        case ValueKind::Bus:
            return BusSpec::parse(raw);
    }
    throw ParseError("unknown value kind");
}

std::string format_value(const DssValue& value) {
    struct Visitor {
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(const std::string& s) const { return quote_text(s); }
        std::string operator()(const NumberArray& a) const {
            std::string out = "[";
            for (std::size_t i = 0; i < a.size(); ++i) out += (i ? " " : "") + format_number(a[i]);
            return out + "]";
        }
        std::string operator()(const TextArray& a) const {
            std::string out = "[";
            for (std::size_t i = 0; i < a.size(); ++i) out += (i ? " " : "") + quote_text(a[i]);
            return out + "]";
        }
        std::string operator()(const SymMatrix& m) const {
            std::string out = "[";
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (i) out += " | ";
                for (std::size_t j = 0; j <= i; ++j) out += (j ? " " : "") + format_number(m(i, j));
            }
            return out + "]";
        }
        std::string operator()(const BusSpec& b) const { return b.str(); }
    };
    return std::visit(Visitor{}, value);
}

}  // namespace mcdist::dss

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcdist/common/errors.hpp"

namespace mcdist::dss {

enum class Verb { New, Edit, Set, Redirect, Other };

/// One `key=value` pair, or a positional value when `key` is empty.
/// Keys are lowercased; values keep their delimiters (quotes, brackets,
/// parentheses) so that typing can tell RPN from arrays.
struct RawProperty {
    std::string key;
    std::string value;

    bool positional() const { return key.empty(); }
    bool operator==(const RawProperty&) const = default;
};

struct DssStatement {
    Verb verb = Verb::Other;
    /// Original verb word, lowercased ("new", "compile", "solve", ...).
    std::string verb_text;
    std::string object_class;
    std::string object_name;
    std::vector<RawProperty> properties;
    SourceLocation location;
};

/// Split DSS text into statements. Resolves `~` / `more` continuation
/// lines, `!` and `//` comments, and quoted or bracketed groups.
/// Throws ParseError on a dangling continuation or an unterminated group.
std::vector<DssStatement> tokenize(std::string_view text, const std::string& file = {});

/// Split on whitespace and commas while keeping quoted, bracketed and
/// parenthesized groups intact.
std::vector<std::string> split_items(std::string_view text);

/// Remove one layer of matching outer delimiters ("", '', [], (), {}).
std::string_view strip_delimiters(std::string_view text);

std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);

}  // namespace mcdist::dss

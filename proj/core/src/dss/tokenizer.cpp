#include "mcdist/dss/statement.hpp"

#include <algorithm>
#include <cctype>

namespace mcdist::dss {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }
bool is_separator(char c) { return is_space(c) || c == ','; }
bool is_group_open(char c) { return c == '"' || c == '\'' || c == '[' || c == '(' || c == '{'; }

char group_close(char open) {
    switch (open) {
        case '[': return ']';
        case '(': return ')';
        case '{': return '}';
        default: return open;
    }
}

/// Drop `!` and `//` comments that are not inside quotes.
std::string_view strip_comment(std::string_view line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quote) {
            if (c == quote) quote = 0;
            continue;
        }
        if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '!') {
            return line.substr(0, i);
        } else if (c == '/' && i + 1 < line.size() && line[i + 1] == '/') {
            return line.substr(0, i);
        }
    }
    return line;
}

/// Length of the group starting at text[pos], including both delimiters,
/// or npos when it is not closed on this line.
std::size_t group_length(std::string_view text, std::size_t pos) {
    const char open = text[pos];
    const char close = group_close(open);
    if (open == close) {
        auto end = text.find(close, pos + 1);
        return end == std::string_view::npos ? end : end - pos + 1;
    }
    int depth = 0;
    for (std::size_t i = pos; i < text.size(); ++i) {
        if (text[i] == open) ++depth;
        else if (text[i] == close && --depth == 0) return i - pos + 1;
    }
    return std::string_view::npos;
}

struct Item {
    std::string key;
    std::string value;
    int column = 0;
};

class LineScanner {
  public:
    LineScanner(std::string_view text, const std::string& file, int line)
        : text_(text), file_(file), line_(line) {}

    std::vector<Item> scan() {
        std::vector<Item> items;
        while (true) {
            skip_separators();
            if (pos_ >= text_.size()) break;
            Item item;
            item.column = static_cast<int>(pos_) + 1;
            if (is_group_open(text_[pos_])) {
                item.value = read_group();
            } else {
                std::string word = read_bare(/*stop_at_equals=*/true);
                skip_spaces();
                if (pos_ < text_.size() && text_[pos_] == '=') {
                    ++pos_;
                    skip_spaces();
                    item.key = to_lower(word);
                    item.value = read_value();
                } else {
                    item.value = std::move(word);
                }
            }
            items.push_back(std::move(item));
        }
        return items;
    }

  private:
    void skip_separators() {
        while (pos_ < text_.size() && is_separator(text_[pos_])) ++pos_;
    }
    void skip_spaces() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    }

    std::string read_bare(bool stop_at_equals) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && !is_separator(text_[pos_]) &&
               !(stop_at_equals && text_[pos_] == '=')) {
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string read_group() {
        std::size_t len = group_length(text_, pos_);
        if (len == std::string_view::npos) {
            const char open = text_[pos_];
            const bool quote = open == '"' || open == '\'';
            throw ParseError(quote ? "unterminated quote" : std::string("unterminated '") + open + "' group",
                             SourceLocation{file_, line_, static_cast<int>(pos_) + 1});
        }
        std::string out(text_.substr(pos_, len));
        pos_ += len;
        return out;
    }

    std::string read_value() {
        if (pos_ >= text_.size() || is_separator(text_[pos_])) return {};
        if (is_group_open(text_[pos_])) return read_group();
        return read_bare(/*stop_at_equals=*/false);
    }

    std::string_view text_;
    const std::string& file_;
    int line_;
    std::size_t pos_ = 0;
};

Verb verb_from(const std::string& word) {
    if (word == "new") return Verb::New;
    if (word == "edit") return Verb::Edit;
    if (word == "set") return Verb::Set;
    if (word == "redirect" || word == "compile") return Verb::Redirect;
    return Verb::Other;
}

void split_object(const std::string& spec, DssStatement& st) {
    auto dot = spec.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == spec.size()) {
        throw ParseError("expected Class.Name after '" + st.verb_text + "', got '" + spec + "'",
                         st.location);
    }
    st.object_class = to_lower(spec.substr(0, dot));
    st.object_name = spec.substr(dot + 1);
}

}  // namespace

std::string_view trim(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return text.substr(b, e - b);
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view strip_delimiters(std::string_view text) {
    text = trim(text);
    if (text.size() >= 2 && is_group_open(text.front()) &&
        text.back() == group_close(text.front()) &&
        group_length(text, 0) == text.size()) {
        return trim(text.substr(1, text.size() - 2));
    }
    return text;
}

std::vector<std::string> split_items(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && is_separator(text[pos])) ++pos;
        if (pos >= text.size()) break;
        std::size_t start = pos;
        if (is_group_open(text[pos])) {
            std::size_t len = group_length(text, pos);
            if (len == std::string_view::npos) throw ParseError("unterminated group in '" + std::string(text) + "'");
            pos += len;
        } else {
            while (pos < text.size() && !is_separator(text[pos])) {
                if (is_group_open(text[pos])) {
                    std::size_t len = group_length(text, pos);
                    if (len == std::string_view::npos) {
                        throw ParseError("unterminated group in '" + std::string(text) + "'");
                    }
                    pos += len;
                } else {
                    ++pos;
                }
            }
        }
        out.emplace_back(text.substr(start, pos - start));
    }
    return out;
}

std::vector<DssStatement> tokenize(std::string_view text, const std::string& file) {
    std::vector<DssStatement> statements;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        std::string_view code = strip_comment(raw);
        if (trim(code).empty()) continue;

        auto items = LineScanner(code, file, line_no).scan();
        if (items.empty()) continue;

        const Item& head = items.front();
        const std::string head_word = head.key.empty() ? to_lower(head.value) : std::string();
        const bool tilde = !head.value.empty() && head.key.empty() && head.value[0] == '~';
        if (tilde || head_word == "more") {
            if (statements.empty()) {
                throw ParseError("continuation line with no statement to continue",
                                 SourceLocation{file, line_no, head.column});
            }
            auto& target = statements.back().properties;
            // "~kw=5" without a space still continues
            if (tilde && head.value.size() > 1) {
                auto rest = LineScanner(std::string_view(head.value).substr(1), file, line_no).scan();
                for (auto& it : rest) target.push_back({it.key, it.value});
            }
            for (std::size_t i = 1; i < items.size(); ++i) target.push_back({items[i].key, items[i].value});
            continue;
        }

        DssStatement st;
        st.location = SourceLocation{file, line_no, head.column};
        if (head_word.empty()) {
            // a line opening with key=value: treat as an unknown command
            st.verb = Verb::Other;
            st.verb_text = head.key;
            st.properties.push_back({head.key, head.value});
            statements.push_back(std::move(st));
            continue;
        }
        st.verb_text = head_word;
        st.verb = verb_from(head_word);

        std::size_t next = 1;
        if (st.verb == Verb::New || st.verb == Verb::Edit) {
            if (items.size() < 2) {
                throw ParseError("'" + head_word + "' requires an object name", st.location);
            }
            const Item& obj = items[1];
            if (!obj.key.empty() && obj.key != "object") {
                throw ParseError("expected object name after '" + head_word + "'", st.location);
            }
            split_object(std::string(strip_delimiters(obj.value)), st);
            next = 2;
        }
        for (std::size_t i = next; i < items.size(); ++i) {
            st.properties.push_back({items[i].key, items[i].value});
        }
        if (st.verb == Verb::Redirect && st.properties.empty()) {
            throw ParseError("'" + head_word + "' requires a file name", st.location);
        }
        statements.push_back(std::move(st));
    }
    return statements;
}

}  // namespace mcdist::dss

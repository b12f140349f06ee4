#include "mcdist/dss/redirect.hpp"

#include <fstream>
#include <sstream>

#include "mcdist/common/errors.hpp"

namespace mcdist::dss {

namespace fs = std::filesystem;

FileReader filesystem_reader() {
    return [](const fs::path& path) -> std::optional<std::string> {
        std::ifstream in(path, std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
}

namespace {

void expand(const fs::path& file, const FileReader& reader, std::vector<fs::path>& stack,
            std::vector<DssStatement>& out, const SourceLocation* from) {
    const fs::path normal = file.lexically_normal();
    for (const auto& open : stack) {
        if (open == normal) {
            std::string cycle;
            bool in_cycle = false;
            for (const auto& p : stack) {
                in_cycle = in_cycle || p == normal;
                if (in_cycle) cycle += p.generic_string() + " -> ";
            }
            cycle += normal.generic_string();
            throw ParseError("redirect cycle: " + cycle, from ? *from : SourceLocation{});
        }
    }
    auto text = reader(normal);
    if (!text) {
        const std::string msg = "cannot read file '" + normal.generic_string() + "'";
        if (from) throw ParseError(msg, *from);
        throw ParseError(msg);
    }

    stack.push_back(normal);
    for (auto& st : tokenize(*text, normal.generic_string())) {
        if (st.verb != Verb::Redirect) {
            out.push_back(std::move(st));
            continue;
        }
        fs::path target(std::string(strip_delimiters(st.properties.front().value)));
        if (target.is_relative()) target = normal.parent_path() / target;
        expand(target, reader, stack, out, &st.location);
    }
    stack.pop_back();
}

}  // namespace

std::vector<DssStatement> resolve_redirects(const fs::path& entry_file, const FileReader& reader) {
    std::vector<fs::path> stack;
    std::vector<DssStatement> out;
    expand(entry_file, reader, stack, out, nullptr);
    return out;
}

}  // namespace mcdist::dss

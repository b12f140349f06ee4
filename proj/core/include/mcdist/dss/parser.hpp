#pragma once

#include <filesystem>
#include <string_view>

#include "mcdist/dss/data_model.hpp"
#include "mcdist/dss/redirect.hpp"

namespace mcdist::dss {

inline DssDataModel parse_file(const std::filesystem::path& path,
                               const FileReader& reader = filesystem_reader()) {
    return build_data_model(resolve_redirects(path, reader));
}

inline DssDataModel parse_text(std::string_view text) {
    return build_data_model(tokenize(text));
}

}  // namespace mcdist::dss

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcdist/dss/statement.hpp"

namespace mcdist::dss {

using FileReader = std::function<std::optional<std::string>(const std::filesystem::path&)>;

/// Reads from the local filesystem.
FileReader filesystem_reader();

/// Tokenize `entry_file` and splice every Redirect/Compile target inline,
/// depth first. Relative targets resolve against the redirecting file.
std::vector<DssStatement> resolve_redirects(const std::filesystem::path& entry_file,
                                            const FileReader& reader);

}  // namespace mcdist::dss

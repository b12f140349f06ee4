#pragma once

#include <stdexcept>
#include <string>

namespace mcdist {

struct SourceLocation {
    std::string file;
    int line = 0;
    int column = 0;

    std::string str() const {
        std::string out = file.empty() ? std::string("<input>") : file;
        if (line > 0) {
            out += ":" + std::to_string(line);
            if (column > 0) out += ":" + std::to_string(column);
        }
        return out;
    }
};

/// Malformed input text. Carries the location of the offending statement.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& message, SourceLocation location)
        : std::runtime_error(location.str() + ": " + message), location_(std::move(location)) {}
    explicit ParseError(const std::string& message) : std::runtime_error(message) {}

    const SourceLocation& location() const noexcept { return location_; }

  private:
    SourceLocation location_;
};

/// Input is syntactically fine but describes an inconsistent model
/// (missing references, bad bases, invalid component data).
class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A valid model that the requested operation cannot handle
/// (meshed topology for a radial-only method, unsupported winding, ...).
class UnsupportedError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace mcdist

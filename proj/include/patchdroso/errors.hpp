#pragma once

#include <stdexcept>
#include <string>

namespace droso {

// File could not be opened/read/written.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// File exists but is not a format we decode.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace droso

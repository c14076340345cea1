#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jasper/properties.hpp"

namespace jasper::config {

struct Assignment {
    std::string name;
    std::string value;
    std::size_t line = 0;
};

/// Reads the assignments of a config file in file order.
///
/// Each line is blank, a comment (first non-space character is `#`) or
/// `name=value`. The name is trimmed; the value is everything after the first
/// `=`, verbatim. LF and CRLF terminators are accepted.
///
/// Throws IoError if the file cannot be read and ParseError for any other
/// kind of line, including an assignment with an empty name.
std::vector<Assignment> read_assignments(const std::filesystem::path& path);

/// Binds every assignment as `CONFIG.<name>`.
void parse(const std::filesystem::path& path, PropertyMap& props);

/// Binds every assignment as `<prefix>.<name>`. `prefix` has no trailing dot.
void parse_bare(const std::filesystem::path& path, std::string_view prefix,
                PropertyMap& props);

} // namespace jasper::config

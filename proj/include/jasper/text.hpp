#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace jasper::text {

std::string_view trim(std::string_view s) noexcept;

/// Whole file as bytes; throws IoError on failure.
std::string read_file(const std::filesystem::path& path);

/// Replaces every CRLF with LF.
std::string normalize_newlines(std::string_view s);

/// Splits on LF. A trailing LF yields a final empty element, so joining the
/// result with LF reproduces the input. "" yields {""}.
std::vector<std::string> split_lines(std::string_view s);

/// application/x-www-form-urlencoded encoding: space becomes `+`,
/// `A-Z a-z 0-9 - _ . ! , * ( )` pass through, every other byte is `%HH`.
std::string form_encode(std::string_view s);

/// Inverse of form_encode: `+` becomes space and `%HH` a byte. A `%` not
/// followed by two hex digits is kept literally.
std::string form_decode(std::string_view s);

} // namespace jasper::text

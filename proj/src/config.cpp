#include "jasper/config.hpp"

#include <fstream>

#include "jasper/error.hpp"
#include "jasper/text.hpp"

namespace jasper::config {

std::vector<Assignment> read_assignments(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path.string() + "'");

    std::vector<Assignment> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        auto body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;

        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path.string() + ":" + std::to_string(number) +
                                 ": expected name=value",
                             number);
        }
        auto name = text::trim(std::string_view(line).substr(0, eq));
        if (name.empty()) {
            throw ParseError(path.string() + ":" + std::to_string(number) +
                                 ": empty name before '='",
                             number);
        }
        out.push_back({std::string(name), line.substr(eq + 1), number});
    }
    if (in.bad()) throw IoError("error reading config file '" + path.string() + "'");
    return out;
}

void parse(const std::filesystem::path& path, PropertyMap& props) {
    parse_bare(path, "CONFIG", props);
}

void parse_bare(const std::filesystem::path& path, std::string_view prefix,
                PropertyMap& props) {
    // Read everything first so a parse error leaves props untouched.
    auto assignments = read_assignments(path);
    std::string key_prefix = std::string(prefix) + ".";
    for (auto& a : assignments) props.set(key_prefix + a.name, std::move(a.value));
}

} // namespace jasper::config

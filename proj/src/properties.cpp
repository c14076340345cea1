#include "jasper/properties.hpp"

#include "jasper/error.hpp"

namespace jasper {

bool is_namespaced_key(std::string_view key) noexcept {
    for (auto prefix : kNamespaces) {
        if (key.size() > prefix.size() && key.starts_with(prefix)) return true;
    }
    return false;
}

PropertyMap::PropertyMap(
    std::initializer_list<std::pair<const std::string, std::string>> init) {
    for (const auto& [key, value] : init) set(key, value);
}

std::optional<std::string> PropertyMap::get(std::string_view key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void PropertyMap::set(std::string_view key, std::string value) {
    if (!is_namespaced_key(key)) {
        throw NamespaceError("property key '" + std::string(key) +
                             "' lacks a namespace prefix");
    }
    auto it = entries_.find(key);
    if (it != entries_.end()) {
        it->second = std::move(value);
    } else {
        entries_.emplace(std::string(key), std::move(value));
    }
}

void PropertyMap::unset(std::string_view key) {
    auto it = entries_.find(key);
    if (it != entries_.end()) entries_.erase(it);
}

bool PropertyMap::contains(std::string_view key) const {
    return entries_.find(key) != entries_.end();
}

std::string PropertyMap::value_or_empty(std::string_view key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? std::string() : it->second;
}

} // namespace jasper

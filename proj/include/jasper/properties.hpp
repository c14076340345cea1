#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace jasper {

/// Namespace prefixes accepted as property keys.
inline constexpr std::array<std::string_view, 5> kNamespaces = {
    "CONFIG.", "FORM.", "VAR.", "ERROR.", "SERIAL."};

/// True iff `key` is one of the namespace prefixes followed by a nonempty name.
bool is_namespaced_key(std::string_view key) noexcept;

/// The global properties array: the per-request map of namespaced string keys
/// to string values that every template, form and config operation threads
/// through.
///
/// Absent and empty are different states: `get` returns `std::nullopt` for
/// the former and an empty string for the latter. Values are stored verbatim.
class PropertyMap {
public:
    using Storage = std::map<std::string, std::string, std::less<>>;
    using const_iterator = Storage::const_iterator;

    PropertyMap() = default;
    PropertyMap(std::initializer_list<std::pair<const std::string, std::string>> init);

    std::optional<std::string> get(std::string_view key) const;

    /// Throws NamespaceError when `key` is not namespaced.
    void set(std::string_view key, std::string value);

    /// Removing an absent key is a no-op.
    void unset(std::string_view key);

    bool contains(std::string_view key) const;

    /// Bound value or the empty string.
    std::string value_or_empty(std::string_view key) const;

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const_iterator begin() const noexcept { return entries_.begin(); }
    const_iterator end() const noexcept { return entries_.end(); }

    friend bool operator==(const PropertyMap&, const PropertyMap&) = default;

private:
    Storage entries_;
};

} // namespace jasper

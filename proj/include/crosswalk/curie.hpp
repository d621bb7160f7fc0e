#pragma once
// Compact URIs (prefix:local_id) and the prefix maps that expand them.

#include <compare>
#include <map>
#include <string>
#include <string_view>

namespace crosswalk {

struct Curie {
    std::string prefix;
    std::string local_id;

    std::string str() const { return prefix + ":" + local_id; }

    auto operator<=>(const Curie&) const = default;
};

// Splits on the first ':'. Throws Error(MalformedCurie) when there is no
// colon or either side is empty.
Curie parse_curie(std::string_view text);

// Ordered prefix -> URI base table. Prefixes are unique, bases non-empty.
class PrefixMap {
public:
    PrefixMap() = default;

    // Throws Error(MalformedCurie) for an empty or colon-bearing prefix and
    // Error(Value) for an empty base. Re-inserting a prefix overwrites it.
    void set(const std::string& prefix, const std::string& base);

    bool contains(std::string_view prefix) const;
    const std::string* find(std::string_view prefix) const;

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

    bool operator==(const PrefixMap&) const = default;

private:
    std::map<std::string, std::string, std::less<>> entries_;
};

// map[prefix] + local_id. Throws Error(UnresolvedPrefix) for unknown prefixes.
std::string expand(const Curie& curie, const PrefixMap& map);

// Longest matching URI base wins. Throws Error(UncontractableUri) when no
// base is a prefix of the URI or the remainder would be empty.
Curie contract(std::string_view uri, const PrefixMap& map);

} // namespace crosswalk

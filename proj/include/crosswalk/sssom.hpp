#pragma once
// SSSOM mapping files: a '#'-prefixed YAML header followed by a TSV table.

#include "crosswalk/curie.hpp"

#include <array>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace crosswalk {

struct Mapping {
    Curie subject_id;
    Curie predicate_id;
    Curie object_id;
    std::optional<std::string> subject_label;
    std::optional<std::string> object_label;
    std::optional<Curie> mapping_justification;
    std::optional<double> confidence;
    std::optional<std::string> author_id;
    std::optional<std::string> reviewer_id;
    std::optional<std::string> mapping_tool;
    std::string mapping_set_id;
    std::map<std::string, std::string> extensions;

    bool operator==(const Mapping&) const = default;
};

// Header values are kept verbatim: a scalar, a block list of scalars, or a
// one-level map of scalars.
using MetadataList = std::vector<std::string>;
using MetadataMap = std::map<std::string, std::string>;
using MetadataValue = std::variant<std::string, MetadataList, MetadataMap>;

struct MappingSet {
    std::string mapping_set_id;
    PrefixMap curie_map;
    std::map<std::string, MetadataValue> other_metadata;
    std::vector<Mapping> mappings;

    bool operator==(const MappingSet&) const = default;
};

// Canonical column order for serialization. mapping_set_id is only written
// when some row overrides the set-level id.
inline constexpr std::array<std::string_view, 10> kCanonicalColumns = {
    "subject_id",  "subject_label", "predicate_id", "object_id",   "object_label",
    "mapping_justification", "confidence", "author_id", "reviewer_id", "mapping_tool",
};

bool is_known_column(std::string_view name);

MappingSet parse_mapping_file(std::string_view text);
std::string serialize_mapping_set(const MappingSet& set);
// Streams the header of `set` followed by `rows`; set.mappings is ignored.
void write_mapping_set(std::ostream& out, const MappingSet& set, std::span<const Mapping> rows);

struct Violation {
    std::string field;
    std::string constraint;

    bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_mapping(const Mapping& m);

// Shortest decimal text that reads back to the same double.
std::string format_confidence(double value);

} // namespace crosswalk

#pragma once
// Immutable, field-searchable view over a release. Two collections mirror the
// SSSOM model: mapping documents and mapping-set documents.

#include "crosswalk/materializer.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crosswalk {

struct MappingDoc {
    MappingId id;
    Mapping mapping;
    bool inferred = false;
    bool has_explanation = false;

    // Text value of a searchable field; nullopt when absent.
    std::optional<std::string> field(std::string_view name) const;
};

struct MappingSetDoc {
    std::string mapping_set_id;
    std::map<std::string, MetadataValue> metadata;
    std::size_t mapping_count = 0;
    bool inference = false;
};

inline constexpr std::size_t kDefaultPageSize = 20;
inline constexpr std::size_t kMaxPageSize = 500;

struct Query {
    std::map<std::string, std::string> field_filters;
    std::optional<std::string> free_text;
    std::size_t page = 0;
    std::size_t size = kDefaultPageSize;
};

struct SearchPage {
    std::size_t total = 0;
    std::size_t page = 0;
    std::size_t size = 0;
    std::vector<const MappingDoc*> results;
};

class Index {
public:
    // Throws Error(IdCollision) on duplicate ids and Error(Validation) when an
    // explanation references an id that is not indexed.
    explicit Index(const Release& release);

    std::size_t size() const { return docs_.size(); }
    std::size_t inferred_count() const { return inferred_count_; }
    bool empty() const { return docs_.empty(); }

    // Sorted by subject, predicate, object, mapping set.
    const std::vector<MappingDoc>& docs() const { return docs_; }
    const MappingDoc* find(const MappingId& id) const;

    const std::vector<MappingSetDoc>& mapping_sets() const { return sets_; }
    const MappingSetDoc* find_set(std::string_view mapping_set_id) const;

    // Field names accepted by search().
    const std::vector<std::string>& fields() const { return fields_; }

    // Throws Error(UnknownField) listing the valid fields, or
    // Error(Validation) for a page size outside [1, 500].
    SearchPage search(const Query& query) const;

    const ExplanationRecord* explanation_record(const MappingId& id) const;
    // Recursive explanation: inferred nodes carry the rule id and their
    // premises, asserted nodes are leaves. Throws Error(NotFound).
    nlohmann::ordered_json explanation(const MappingId& id) const;

    const std::string& inference_set_id() const { return inference_set_id_; }

private:
    nlohmann::ordered_json explain_node(std::size_t doc, std::vector<std::size_t>& path) const;

    std::string inference_set_id_;
    std::vector<MappingDoc> docs_;
    std::vector<std::string> lowered_labels_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::map<std::string, std::unordered_map<std::string, std::vector<std::size_t>>> postings_;
    std::vector<std::string> fields_;
    std::vector<MappingSetDoc> sets_;
    std::map<MappingId, ExplanationRecord> explanations_;
    std::size_t inferred_count_ = 0;
};

nlohmann::ordered_json to_json(const MappingDoc& doc);
nlohmann::ordered_json to_json(const MappingSetDoc& doc);
nlohmann::ordered_json to_json(const SearchPage& page);

} // namespace crosswalk

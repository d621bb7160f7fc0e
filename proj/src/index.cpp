#include "crosswalk/index.hpp"

#include "crosswalk/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

namespace crosswalk {

using nlohmann::ordered_json;

namespace {

constexpr std::string_view kBuiltinFields[] = {
    "id",           "subject_id",  "subject_label", "predicate_id", "object_id",     "object_label",
    "mapping_justification", "confidence", "author_id", "reviewer_id", "mapping_tool", "mapping_set_id",
    "inferred",     "has_explanation",
};

bool is_builtin(std::string_view name) {
    return std::find(std::begin(kBuiltinFields), std::end(kBuiltinFields), name) != std::end(kBuiltinFields);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

ordered_json metadata_value_json(const MetadataValue& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    if (const auto* l = std::get_if<MetadataList>(&value)) return *l;
    ordered_json out = ordered_json::object();
    for (const auto& [k, v] : std::get<MetadataMap>(value)) out[k] = v;
    return out;
}

} // namespace

std::optional<std::string> MappingDoc::field(std::string_view name) const {
    const auto& m = mapping;
    if (name == "id") return id.value;
    if (name == "subject_id") return m.subject_id.str();
    if (name == "subject_label") return m.subject_label;
    if (name == "predicate_id") return m.predicate_id.str();
    if (name == "object_id") return m.object_id.str();
    if (name == "object_label") return m.object_label;
    if (name == "mapping_justification") {
        if (!m.mapping_justification) return std::nullopt;
        return m.mapping_justification->str();
    }
    if (name == "confidence") {
        if (!m.confidence) return std::nullopt;
        return format_confidence(*m.confidence);
    }
    if (name == "author_id") return m.author_id;
    if (name == "reviewer_id") return m.reviewer_id;
    if (name == "mapping_tool") return m.mapping_tool;
    if (name == "mapping_set_id") return m.mapping_set_id;
    if (name == "inferred") return inferred ? "true" : "false";
    if (name == "has_explanation") return has_explanation ? "true" : "false";
    if (auto it = m.extensions.find(std::string(name)); it != m.extensions.end()) return it->second;
    return std::nullopt;
}

Index::Index(const Release& release) : inference_set_id_(release.stamp.inference_set_id) {
    explanations_ = release.explanations;

    docs_.reserve(release.asserted.size() + release.inferred.size());
    for (const auto* list : {&release.asserted, &release.inferred}) {
        for (const auto& m : *list) {
            MappingDoc doc;
            doc.id = mapping_id(m);
            doc.mapping = m;
            doc.inferred = m.mapping_set_id == inference_set_id_;
            doc.has_explanation = explanations_.count(doc.id) > 0;
            docs_.push_back(std::move(doc));
        }
    }
    std::sort(docs_.begin(), docs_.end(), [](const MappingDoc& a, const MappingDoc& b) {
        const auto& x = a.mapping;
        const auto& y = b.mapping;
        return std::forward_as_tuple(x.subject_id, x.predicate_id, x.object_id, x.mapping_set_id) <
               std::forward_as_tuple(y.subject_id, y.predicate_id, y.object_id, y.mapping_set_id);
    });

    std::set<std::string> extension_fields;
    std::map<std::string, std::size_t> set_counts;
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        const auto& doc = docs_[i];
        if (!by_id_.emplace(doc.id.value, i).second) {
            throw Error(ErrorCode::IdCollision, "duplicate mapping id " + doc.id.value + " in release");
        }
        if (doc.inferred) ++inferred_count_;
        ++set_counts[doc.mapping.mapping_set_id];
        lowered_labels_.push_back(lower(doc.mapping.subject_label.value_or("")) + "\n" +
                                  lower(doc.mapping.object_label.value_or("")));
        for (const auto& [k, v] : doc.mapping.extensions) {
            if (!is_builtin(k)) extension_fields.insert(k);
        }
    }

    fields_.assign(std::begin(kBuiltinFields), std::end(kBuiltinFields));
    fields_.insert(fields_.end(), extension_fields.begin(), extension_fields.end());
    for (const auto& f : fields_) {
        auto& postings = postings_[f];
        for (std::size_t i = 0; i < docs_.size(); ++i) {
            if (auto value = docs_[i].field(f)) postings[*value].push_back(i);
        }
    }

    for (const auto& [id, record] : explanations_) {
        for (const auto& p : record.premises) {
            if (!by_id_.count(p.value)) {
                throw Error(ErrorCode::Validation,
                            "explanation of " + id.value + " references unknown mapping " + p.value);
            }
        }
    }

    std::map<std::string, const SetInfo*> infos;
    for (const auto& info : release.sets) infos.emplace(info.mapping_set_id, &info);
    for (const auto& [set_id, count] : set_counts) {
        MappingSetDoc doc;
        doc.mapping_set_id = set_id;
        doc.mapping_count = count;
        doc.inference = set_id == inference_set_id_;
        if (auto it = infos.find(set_id); it != infos.end()) {
            doc.metadata = it->second->metadata;
        } else if (doc.inference) {
            doc.metadata = {{"mapping_tool", release.stamp.tool_name}};
        }
        sets_.push_back(std::move(doc));
    }
}

const MappingDoc* Index::find(const MappingId& id) const {
    auto it = by_id_.find(id.value);
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

const MappingSetDoc* Index::find_set(std::string_view mapping_set_id) const {
    auto it = std::find_if(sets_.begin(), sets_.end(),
                           [&](const MappingSetDoc& d) { return d.mapping_set_id == mapping_set_id; });
    return it == sets_.end() ? nullptr : &*it;
}

const ExplanationRecord* Index::explanation_record(const MappingId& id) const {
    auto it = explanations_.find(id);
    return it == explanations_.end() ? nullptr : &it->second;
}

SearchPage Index::search(const Query& query) const {
    for (const auto& [field, value] : query.field_filters) {
        if (std::find(fields_.begin(), fields_.end(), field) == fields_.end()) {
            std::string valid;
            for (const auto& f : fields_) valid += (valid.empty() ? "" : ", ") + f;
            throw Error(ErrorCode::UnknownField, "unknown field '" + field + "'; valid fields: " + valid);
        }
    }
    if (query.size < 1 || query.size > kMaxPageSize) {
        throw Error(ErrorCode::Validation, "page size must be in [1, " + std::to_string(kMaxPageSize) + "]");
    }

    // Drive the scan from the shortest posting list.
    static const std::vector<std::size_t> kNone;
    const std::vector<std::size_t>* driver = nullptr;
    for (const auto& [field, value] : query.field_filters) {
        const auto& postings = postings_.at(field);
        auto it = postings.find(value);
        const auto* list = it == postings.end() ? &kNone : &it->second;
        if (!driver || list->size() < driver->size()) driver = list;
    }
    const std::string needle = query.free_text ? lower(*query.free_text) : std::string{};

    auto matches = [&](std::size_t i) {
        for (const auto& [field, value] : query.field_filters) {
            if (docs_[i].field(field) != value) return false;
        }
        return needle.empty() || lowered_labels_[i].find(needle) != std::string::npos;
    };

    SearchPage page;
    page.page = query.page;
    page.size = query.size;
    const std::size_t first = query.page * query.size;
    auto visit = [&](std::size_t i) {
        if (!matches(i)) return;
        if (page.total >= first && page.results.size() < query.size) page.results.push_back(&docs_[i]);
        ++page.total;
    };
    if (driver) {
        for (auto i : *driver) visit(i);
    } else {
        for (std::size_t i = 0; i < docs_.size(); ++i) visit(i);
    }
    return page;
}

ordered_json Index::explain_node(std::size_t doc_index, std::vector<std::size_t>& path) const {
    const auto& doc = docs_[doc_index];
    ordered_json node;
    node["id"] = doc.id.value;
    const auto* record = explanation_record(doc.id);
    node["asserted"] = record == nullptr;
    if (record) node["rule_id"] = record->rule_id;
    node["mapping"] = to_json(doc);
    if (!record) return node;

    if (std::find(path.begin(), path.end(), doc_index) != path.end()) {
        throw Error(ErrorCode::Validation, "cyclic explanation through " + doc.id.value);
    }
    path.push_back(doc_index);
    node["premises"] = ordered_json::array();
    for (const auto& p : record->premises) node["premises"].push_back(explain_node(by_id_.at(p.value), path));
    path.pop_back();
    return node;
}

ordered_json Index::explanation(const MappingId& id) const {
    auto it = by_id_.find(id.value);
    if (it == by_id_.end()) throw Error(ErrorCode::NotFound, "no mapping with id " + id.value);
    std::vector<std::size_t> path;
    return explain_node(it->second, path);
}

ordered_json to_json(const MappingDoc& doc) {
    const auto& m = doc.mapping;
    ordered_json j;
    j["id"] = doc.id.value;
    j["subject_id"] = m.subject_id.str();
    if (m.subject_label) j["subject_label"] = *m.subject_label;
    j["predicate_id"] = m.predicate_id.str();
    j["object_id"] = m.object_id.str();
    if (m.object_label) j["object_label"] = *m.object_label;
    if (m.mapping_justification) j["mapping_justification"] = m.mapping_justification->str();
    if (m.confidence) j["confidence"] = *m.confidence;
    if (m.author_id) j["author_id"] = *m.author_id;
    if (m.reviewer_id) j["reviewer_id"] = *m.reviewer_id;
    if (m.mapping_tool) j["mapping_tool"] = *m.mapping_tool;
    j["mapping_set_id"] = m.mapping_set_id;
    for (const auto& [k, v] : m.extensions) {
        if (!is_builtin(k)) j[k] = v;
    }
    j["inferred"] = doc.inferred;
    j["has_explanation"] = doc.has_explanation;
    return j;
}

ordered_json to_json(const MappingSetDoc& doc) {
    ordered_json j;
    j["mapping_set_id"] = doc.mapping_set_id;
    for (const auto& [k, v] : doc.metadata) {
        if (k != "mapping_set_id" && k != "mapping_count" && k != "inference") j[k] = metadata_value_json(v);
    }
    j["mapping_count"] = doc.mapping_count;
    j["inference"] = doc.inference;
    return j;
}

ordered_json to_json(const SearchPage& page) {
    ordered_json j;
    j["total"] = page.total;
    j["page"] = page.page;
    j["size"] = page.size;
    j["results"] = ordered_json::array();
    for (const auto* doc : page.results) j["results"].push_back(to_json(*doc));
    return j;
}

} // namespace crosswalk

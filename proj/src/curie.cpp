#include "crosswalk/curie.hpp"

#include "crosswalk/error.hpp"

namespace crosswalk {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedCurie: return "malformed-curie";
    case ErrorCode::UnresolvedPrefix: return "unresolved-prefix";
    case ErrorCode::UncontractableUri: return "uncontractable-uri";
    case ErrorCode::InvalidHeader: return "invalid-header";
    case ErrorCode::RowArity: return "row-arity";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::Value: return "value";
    case ErrorCode::RuleSyntax: return "rule-syntax";
    case ErrorCode::DuplicateRule: return "duplicate-rule";
    case ErrorCode::RangeRestriction: return "range-restriction";
    case ErrorCode::UnknownFact: return "unknown-fact";
    case ErrorCode::IdCollision: return "id-collision";
    case ErrorCode::PrefixConflict: return "prefix-conflict";
    case ErrorCode::Io: return "io";
    case ErrorCode::UnknownField: return "unknown-field";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::ContractViolation: return "contract-violation";
    }
    return "unknown";
}

Curie parse_curie(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorCode::MalformedCurie, "malformed CURIE '" + std::string(text) + "': no ':'");
    }
    if (colon == 0 || colon + 1 == text.size()) {
        throw Error(ErrorCode::MalformedCurie,
                    "malformed CURIE '" + std::string(text) + "': empty prefix or local id");
    }
    return Curie{std::string(text.substr(0, colon)), std::string(text.substr(colon + 1))};
}

void PrefixMap::set(const std::string& prefix, const std::string& base) {
    if (prefix.empty() || prefix.find(':') != std::string::npos) {
        throw Error(ErrorCode::MalformedCurie, "invalid prefix '" + prefix + "'");
    }
    if (base.empty()) {
        throw Error(ErrorCode::Value, "empty URI base for prefix '" + prefix + "'");
    }
    entries_[prefix] = base;
}

bool PrefixMap::contains(std::string_view prefix) const {
    return entries_.find(prefix) != entries_.end();
}

const std::string* PrefixMap::find(std::string_view prefix) const {
    auto it = entries_.find(prefix);
    return it == entries_.end() ? nullptr : &it->second;
}

std::string expand(const Curie& curie, const PrefixMap& map) {
    const std::string* base = map.find(curie.prefix);
    if (!base) {
        throw Error(ErrorCode::UnresolvedPrefix, "unresolved prefix '" + curie.prefix + "'");
    }
    return *base + curie.local_id;
}

Curie contract(std::string_view uri, const PrefixMap& map) {
    const std::pair<const std::string, std::string>* best = nullptr;
    for (const auto& entry : map.entries()) {
        const std::string& base = entry.second;
        if (base.size() >= uri.size() || uri.substr(0, base.size()) != base) continue;
        // Ties on length resolve to the lexicographically first prefix.
        if (!best || base.size() > best->second.size()) best = &entry;
    }
    if (!best) {
        throw Error(ErrorCode::UncontractableUri, "no prefix matches URI '" + std::string(uri) + "'");
    }
    return Curie{best->first, std::string(uri.substr(best->second.size()))};
}

} // namespace crosswalk

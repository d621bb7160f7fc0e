#include "crosswalk/materializer.hpp"

#include "crosswalk/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <charconv>
#include <set>
#include <unordered_set>

namespace crosswalk {

using datalog::FactId;
using datalog::Triple;

MappingId mapping_id(std::string_view subject, std::string_view predicate, std::string_view object,
                     std::string_view mapping_set_id) {
    std::string input;
    input.reserve(subject.size() + predicate.size() + object.size() + mapping_set_id.size() + 3);
    input.append(subject).append("|").append(predicate).append("|").append(object).append("|").append(mapping_set_id);

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(input.data(), input.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::ContractViolation, "SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(16);
    for (int i = 0; i < 8; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 0xF];
    }
    return MappingId{std::move(hex)};
}

MappingId mapping_id(const Mapping& m) {
    return mapping_id(m.subject_id.str(), m.predicate_id.str(), m.object_id.str(), m.mapping_set_id);
}

std::optional<double> derive_confidence(std::span<const std::optional<double>> premise_confidences) {
    std::optional<double> out;
    for (const auto& c : premise_confidences) {
        if (c && (!out || *c < *out)) out = c;
    }
    return out;
}

double estimate_crosswalk_cost(double terms, double degree, int distance) {
    if (terms < 0 || degree < 0 || distance < 1) {
        throw Error(ErrorCode::Validation, "cost estimate needs terms >= 0, degree >= 0, distance >= 1");
    }
    return std::pow(degree, distance) * terms * terms;
}

std::string format_cost(double cost) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9e", cost);
    std::string text(buf);
    const auto e = text.find('e');
    if (e == std::string::npos) return text; // inf / nan
    std::string mantissa = text.substr(0, e);
    std::string exponent = text.substr(e + 1);
    std::string sign;
    if (!exponent.empty() && (exponent[0] == '+' || exponent[0] == '-')) {
        if (exponent[0] == '-') sign = "-";
        exponent.erase(0, 1);
    }
    exponent.erase(0, std::min(exponent.find_first_not_of('0'), exponent.size() - 1));
    return mantissa + "e" + sign + exponent;
}

namespace {

std::uint64_t id_bits(const MappingId& id) {
    std::uint64_t bits = 0;
    std::from_chars(id.value.data(), id.value.data() + id.value.size(), bits, 16);
    return bits;
}

PrefixMap merge_prefix_maps(const std::vector<MappingSet>& sets) {
    PrefixMap merged;
    std::map<std::string, std::string> origin;
    for (const auto& set : sets) {
        for (const auto& [prefix, base] : set.curie_map.entries()) {
            if (const auto* existing = merged.find(prefix)) {
                if (*existing != base) {
                    throw Error(ErrorCode::PrefixConflict,
                                "prefix '" + prefix + "' is bound to '" + *existing + "' in " + origin[prefix] +
                                    " and to '" + base + "' in " + set.mapping_set_id);
                }
                continue;
            }
            merged.set(prefix, base);
            origin[prefix] = set.mapping_set_id;
        }
    }
    if (!merged.contains(kSemapvPrefix)) merged.set(std::string(kSemapvPrefix), std::string(kSemapvBase));
    return merged;
}

} // namespace

Release materialize(std::vector<MappingSet> sets, const RuleFile& rules, const InferenceStamp& stamp) {
    const auto started = std::chrono::steady_clock::now();
    datalog::require_valid(rules.rules);

    Release release;
    release.stamp = stamp;
    release.curie_map = merge_prefix_maps(sets);

    std::size_t asserted_count = 0;
    for (const auto& set : sets) asserted_count += set.mappings.size();
    // Ids are 16 hex digits, so collisions are checked on their 64-bit value.
    std::unordered_set<std::uint64_t> ids;
    ids.reserve(asserted_count);
    std::vector<std::uint64_t> asserted_bits;
    std::vector<MappingId> asserted_ids;
    std::vector<Triple> facts;
    asserted_ids.reserve(asserted_count);
    facts.reserve(asserted_count);
    release.asserted.reserve(asserted_count);
    for (auto& set : sets) {
        release.sets.push_back(SetInfo{set.mapping_set_id, std::move(set.other_metadata)});
        for (auto& m : set.mappings) {
            auto id = mapping_id(m);
            if (!ids.insert(id_bits(id)).second) {
                throw Error(ErrorCode::IdCollision, "duplicate mapping id " + id.value + " for " + m.subject_id.str() +
                                                        " " + m.predicate_id.str() + " " + m.object_id.str() +
                                                        " in " + m.mapping_set_id);
            }
            asserted_ids.push_back(std::move(id));
            facts.push_back(mapping_to_fact(m));
            release.asserted.push_back(std::move(m));
        }
        set.mappings = {};
    }

    // Labels: first seen wins.
    {
        std::set<std::string> conflicted;
        auto note = [&](const Curie& c, const std::optional<std::string>& label) {
            if (!label) return;
            auto [it, inserted] = release.label_table.emplace(c.str(), *label);
            if (!inserted && it->second != *label) conflicted.insert(c.str());
        };
        for (const auto& m : release.asserted) {
            note(m.subject_id, m.subject_label);
            note(m.object_id, m.object_label);
        }
        release.stats.label_conflicts = conflicted.size();
    }

    const auto evaluation = datalog::seminaive_eval(std::span<const Triple>(facts), rules.rules);
    const auto& store = evaluation.facts();
    const auto initial = static_cast<FactId>(store.initial_count());
    const auto total = static_cast<FactId>(store.size());

    // The first asserted mapping carrying a triple represents it in
    // explanations and supplies its confidence.
    std::vector<std::size_t> representative(initial, SIZE_MAX);
    for (std::size_t i = 0; i < facts.size(); ++i) {
        const FactId id = *store.find(facts[i]);
        if (representative[id] == SIZE_MAX) representative[id] = i;
    }
    facts = {};

    auto reflexive = [&](FactId id) { return store.fact(id).subject == store.fact(id).object; };

    // Reflexive conclusions are hidden unless an emitted fact's trace passes
    // through one; premises always have smaller ids, so one descending pass
    // settles the closure of that requirement.
    std::vector<char> emit(total, 0);
    for (FactId id = initial; id < total; ++id) emit[id] = !reflexive(id);
    for (FactId id = total; id-- > initial;) {
        if (!emit[id]) continue;
        for (FactId p : evaluation.premises_of(id)) {
            if (p >= initial) emit[p] = 1;
        }
    }

    asserted_bits.assign(ids.begin(), ids.end());
    std::sort(asserted_bits.begin(), asserted_bits.end());
    ids = {};

    release.inferred.reserve(static_cast<std::size_t>(std::count(emit.begin() + initial, emit.end(), 1)));

    std::vector<std::optional<double>> confidence(total);
    for (FactId id = 0; id < initial; ++id) confidence[id] = release.asserted[representative[id]].confidence;
    std::vector<std::optional<double>> premise_conf;
    for (FactId id = initial; id < total; ++id) {
        premise_conf.clear();
        for (FactId p : evaluation.premises_of(id)) premise_conf.push_back(confidence[p]);
        confidence[id] = derive_confidence(premise_conf);
    }

    // Inferred ids point at the explanation keys, which are stable.
    std::vector<const MappingId*> inferred_ids(total, nullptr);
    auto fact_mapping_id = [&](FactId id) -> const MappingId& {
        return id < initial ? asserted_ids[representative[id]] : *inferred_ids[id];
    };
    StampDescriptor descriptor{stamp.inference_set_id, stamp.tool_name, std::nullopt, &release.label_table};
    for (FactId id = initial; id < total; ++id) {
        if (!emit[id]) {
            ++release.stats.suppressed_reflexive;
            continue;
        }
        if (reflexive(id)) ++release.stats.supporting_reflexive;
        descriptor.confidence = confidence[id];
        Mapping m = fact_to_mapping(store.triple(id), descriptor);
        auto mid = mapping_id(m);
        ExplanationRecord record{evaluation.rules()[evaluation.rule_of(id)].id, {}};
        const auto premises = evaluation.premises_of(id);
        record.premises.reserve(premises.size());
        for (FactId p : premises) record.premises.push_back(fact_mapping_id(p));
        const bool clashes_asserted = std::binary_search(asserted_bits.begin(), asserted_bits.end(), id_bits(mid));
        const auto [slot, inserted] = release.explanations.emplace(mid, std::move(record));
        if (clashes_asserted || !inserted) {
            throw Error(ErrorCode::IdCollision, "inferred mapping id " + mid.value + " collides with another mapping");
        }
        inferred_ids[id] = &slot->first;
        release.inferred.push_back(std::move(m));
    }

    auto& stats = release.stats;
    stats.input_sets = sets.size();
    stats.rules = rules.rules.size();
    stats.asserted = release.asserted.size();
    stats.distinct_asserted_triples = initial;
    stats.closure_facts = total;
    stats.derived_facts = total - initial;
    stats.inferred = release.inferred.size();
    stats.rounds = store.round_count();
    stats.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return release;
}

} // namespace crosswalk

#pragma once
// The dataload pipeline: merge mapping sets, run the chain rules to fixpoint,
// stamp inferred mappings and emit a release directory.

#include "crosswalk/chain_rules.hpp"
#include "crosswalk/sssom.hpp"

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crosswalk {

inline constexpr std::string_view kDefaultInferenceSetId = "https://www.ebi.ac.uk/spot/oxo/inferences";
inline constexpr std::string_view kDefaultToolName = "crosswalk-forge";
inline constexpr std::string_view kSemapvPrefix = "SEMAPV";
inline constexpr std::string_view kSemapvBase = "https://w3id.org/semapv/vocab/";

struct InferenceStamp {
    std::string inference_set_id{kDefaultInferenceSetId};
    std::string tool_name{kDefaultToolName};

    // Always SEMAPV:MappingChaining.
    static Curie justification() { return parse_curie(kMappingChaining); }
};

// First 16 hex characters of SHA-256("subject|predicate|object|set").
struct MappingId {
    std::string value;

    auto operator<=>(const MappingId&) const = default;
};

MappingId mapping_id(const Mapping& m);
MappingId mapping_id(std::string_view subject, std::string_view predicate, std::string_view object,
                     std::string_view mapping_set_id);

// Keyed by the inferred mapping's id in Release::explanations.
struct ExplanationRecord {
    std::string rule_id;
    std::vector<MappingId> premises;

    bool operator==(const ExplanationRecord&) const = default;
};

struct SetInfo {
    std::string mapping_set_id;
    std::map<std::string, MetadataValue> metadata;

    bool operator==(const SetInfo&) const = default;
};

struct ReleaseStats {
    std::size_t input_sets = 0;
    std::size_t rules = 0;
    std::size_t asserted = 0;
    std::size_t distinct_asserted_triples = 0;
    std::size_t closure_facts = 0;
    std::size_t derived_facts = 0;
    std::size_t inferred = 0;
    std::size_t suppressed_reflexive = 0;
    // Reflexive facts kept because an emitted explanation passes through them.
    std::size_t supporting_reflexive = 0;
    std::size_t rounds = 0;
    std::size_t label_conflicts = 0;
    double wall_time_seconds = 0.0;
};

struct Release {
    InferenceStamp stamp;
    PrefixMap curie_map;
    std::vector<SetInfo> sets;
    std::vector<Mapping> asserted;
    std::vector<Mapping> inferred;
    std::map<MappingId, ExplanationRecord> explanations;
    std::map<std::string, std::string> label_table;
    ReleaseStats stats;
};

// Throws Error(PrefixConflict) when two sets bind a prefix to different
// bases, Error(IdCollision) for duplicate mapping ids, and propagates rule
// validation errors. The sets are taken by value so their mappings can be
// moved into the release.
Release materialize(std::vector<MappingSet> sets, const RuleFile& rules,
                    const InferenceStamp& stamp = {});

// Minimum of the present values; nullopt when none is present.
std::optional<double> derive_confidence(std::span<const std::optional<double>> premise_confidences);

// k^d * n^2: the number of path expansions a query-time crosswalk needs.
double estimate_crosswalk_cost(double terms, double degree, int distance);
// Scientific notation with nine fraction digits and no '+' in the exponent,
// e.g. 4.393006402e12.
std::string format_cost(double cost);

inline constexpr std::string_view kAssertedFile = "asserted.sssom.tsv";
inline constexpr std::string_view kInferredFile = "inferred.sssom.tsv";
inline constexpr std::string_view kExplanationsFile = "explanations.jsonl";
inline constexpr std::string_view kStatsFile = "stats.json";
inline constexpr std::string_view kSetsFile = "mapping_sets.json";

// Throws Error(Io) with the offending path.
void write_release(const Release& release, const std::filesystem::path& directory);
Release load_release(const std::filesystem::path& directory);

// Stats as JSON text. Wall time is omitted unless requested so the output is
// stable across runs.
std::string stats_json(const ReleaseStats& stats, bool include_timing);

std::string read_file(const std::filesystem::path& path);

} // namespace crosswalk

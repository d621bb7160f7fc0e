#include "crosswalk/error.hpp"
#include "crosswalk/materializer.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace crosswalk {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

template <typename Writer>
void write_stream(const fs::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

void write_file(const fs::path& path, const std::string& content) {
    write_stream(path, [&](std::ostream& out) { out.write(content.data(), static_cast<std::streamsize>(content.size())); });
}

ordered_json metadata_to_json(const std::map<std::string, MetadataValue>& metadata) {
    ordered_json out = ordered_json::object();
    for (const auto& [key, value] : metadata) {
        if (const auto* s = std::get_if<std::string>(&value)) {
            out[key] = *s;
        } else if (const auto* list = std::get_if<MetadataList>(&value)) {
            out[key] = *list;
        } else {
            ordered_json map = ordered_json::object();
            for (const auto& [k, v] : std::get<MetadataMap>(value)) map[k] = v;
            out[key] = map;
        }
    }
    return out;
}

std::map<std::string, MetadataValue> metadata_from_json(const ordered_json& j) {
    std::map<std::string, MetadataValue> out;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string()) {
            out[key] = value.get<std::string>();
        } else if (value.is_array()) {
            out[key] = value.get<MetadataList>();
        } else if (value.is_object()) {
            MetadataMap map;
            for (const auto& [k, v] : value.items()) map[k] = v.get<std::string>();
            out[key] = std::move(map);
        } else {
            throw Error(ErrorCode::Value, "unsupported metadata value for '" + key + "'");
        }
    }
    return out;
}

std::map<std::string, MetadataValue> inference_set_metadata(const InferenceStamp& stamp) {
    return {{"mapping_tool", stamp.tool_name}};
}

} // namespace

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string stats_json(const ReleaseStats& s, bool include_timing) {
    ordered_json j;
    j["input_sets"] = s.input_sets;
    j["rules"] = s.rules;
    j["asserted"] = s.asserted;
    j["distinct_asserted_triples"] = s.distinct_asserted_triples;
    j["closure_facts"] = s.closure_facts;
    j["derived_facts"] = s.derived_facts;
    j["inferred"] = s.inferred;
    j["suppressed_reflexive"] = s.suppressed_reflexive;
    j["supporting_reflexive"] = s.supporting_reflexive;
    j["rounds"] = s.rounds;
    j["label_conflicts"] = s.label_conflicts;
    if (include_timing) j["wall_time_seconds"] = s.wall_time_seconds;
    return j.dump(2);
}

void write_release(const Release& release, const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + directory.string() + ": " + ec.message());

    MappingSet asserted;
    if (release.sets.empty()) {
        asserted.mapping_set_id = "urn:crosswalk:no-input-sets";
    } else {
        asserted.mapping_set_id = release.sets.front().mapping_set_id;
        asserted.other_metadata = release.sets.front().metadata;
    }
    asserted.curie_map = release.curie_map;
    write_stream(directory / kAssertedFile, [&](std::ostream& out) { write_mapping_set(out, asserted, release.asserted); });

    MappingSet inferred;
    inferred.mapping_set_id = release.stamp.inference_set_id;
    inferred.curie_map = release.curie_map;
    inferred.other_metadata = inference_set_metadata(release.stamp);
    write_stream(directory / kInferredFile, [&](std::ostream& out) { write_mapping_set(out, inferred, release.inferred); });

    write_stream(directory / kExplanationsFile, [&](std::ostream& out) {
        for (const auto& m : release.inferred) {
            const auto id = mapping_id(m);
            const auto& record = release.explanations.at(id);
            ordered_json j;
            j["mapping_id"] = id.value;
            j["rule_id"] = record.rule_id;
            j["premises"] = ordered_json::array();
            for (const auto& p : record.premises) j["premises"].push_back(p.value);
            out << j.dump() << '\n';
        }
    });

    ordered_json sets = ordered_json::array();
    for (const auto& info : release.sets) {
        sets.push_back({{"mapping_set_id", info.mapping_set_id}, {"metadata", metadata_to_json(info.metadata)}});
    }
    sets.push_back({{"mapping_set_id", release.stamp.inference_set_id},
                    {"metadata", metadata_to_json(inference_set_metadata(release.stamp))},
                    {"inference", true}});
    write_file(directory / kSetsFile, sets.dump(2) + "\n");

    auto stats = ordered_json::parse(stats_json(release.stats, true));
    stats["inference_set_id"] = release.stamp.inference_set_id;
    stats["tool_name"] = release.stamp.tool_name;
    write_file(directory / kStatsFile, stats.dump(2) + "\n");
}

Release load_release(const fs::path& directory) {
    if (!fs::is_directory(directory)) throw Error(ErrorCode::Io, "release directory " + directory.string() + " not found");
    Release release;

    try {
        const auto stats = ordered_json::parse(read_file(directory / kStatsFile));
        release.stamp.inference_set_id = stats.at("inference_set_id").get<std::string>();
        release.stamp.tool_name = stats.at("tool_name").get<std::string>();
        auto& s = release.stats;
        s.input_sets = stats.value("input_sets", std::size_t{0});
        s.rules = stats.value("rules", std::size_t{0});
        s.asserted = stats.value("asserted", std::size_t{0});
        s.distinct_asserted_triples = stats.value("distinct_asserted_triples", std::size_t{0});
        s.closure_facts = stats.value("closure_facts", std::size_t{0});
        s.derived_facts = stats.value("derived_facts", std::size_t{0});
        s.inferred = stats.value("inferred", std::size_t{0});
        s.suppressed_reflexive = stats.value("suppressed_reflexive", std::size_t{0});
        s.supporting_reflexive = stats.value("supporting_reflexive", std::size_t{0});
        s.rounds = stats.value("rounds", std::size_t{0});
        s.label_conflicts = stats.value("label_conflicts", std::size_t{0});
        s.wall_time_seconds = stats.value("wall_time_seconds", 0.0);

        for (const auto& entry : ordered_json::parse(read_file(directory / kSetsFile))) {
            if (entry.value("inference", false)) continue;
            release.sets.push_back(
                SetInfo{entry.at("mapping_set_id").get<std::string>(), metadata_from_json(entry.at("metadata"))});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Value, "malformed release metadata in " + directory.string() + ": " + e.what());
    }

    auto asserted = parse_mapping_file(read_file(directory / kAssertedFile));
    auto inferred = parse_mapping_file(read_file(directory / kInferredFile));
    release.curie_map = asserted.curie_map;
    release.asserted = std::move(asserted.mappings);
    release.inferred = std::move(inferred.mappings);

    for (const auto& m : release.asserted) {
        for (auto [c, l] : {std::pair{&m.subject_id, &m.subject_label}, std::pair{&m.object_id, &m.object_label}}) {
            if (*l) release.label_table.emplace(c->str(), **l);
        }
    }

    const auto text = read_file(directory / kExplanationsFile);
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = ordered_json::parse(line);
            ExplanationRecord record{j.at("rule_id").get<std::string>(), {}};
            for (const auto& p : j.at("premises")) record.premises.push_back(MappingId{p.get<std::string>()});
            release.explanations.emplace(MappingId{j.at("mapping_id").get<std::string>()}, std::move(record));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Value, std::string(kExplanationsFile) + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return release;
}

} // namespace crosswalk

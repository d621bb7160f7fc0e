#include "crosswalk/cli.hpp"

#include "crosswalk/error.hpp"
#include "crosswalk/index.hpp"
#include "crosswalk/materializer.hpp"
#include "crosswalk/service.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace crosswalk {

namespace {

using nlohmann::ordered_json;

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::Io: return kExitIo;
    case ErrorCode::UnknownField: return kExitUsage;
    default: return kExitValidation;
    }
}

RuleFile load_rules(const std::string& flag_path) {
    std::string path = flag_path;
    if (path.empty()) {
        if (const char* env = std::getenv("CROSSWALK_RULES"); env && *env) path = env;
    }
    if (path.empty()) return default_rules();
    return parse_rule_file(read_file(path), path);
}

int cmd_validate(const std::vector<std::string>& files, std::ostream& out) {
    bool clean = true;
    for (const auto& file : files) {
        const auto text = read_file(file);
        MappingSet set;
        try {
            set = parse_mapping_file(text);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Io) throw;
            out << file << ": " << to_string(e.code()) << ": " << e.what() << "\n";
            clean = false;
            continue;
        }
        bool file_clean = true;
        for (std::size_t row = 0; row < set.mappings.size(); ++row) {
            for (const auto& v : validate_mapping(set.mappings[row])) {
                out << file << ": mapping " << row + 1 << ": " << v.field << ": " << v.constraint << "\n";
                file_clean = false;
            }
        }
        clean = clean && file_clean;
        if (file_clean) out << file << ": ok (" << set.mappings.size() << " mappings)\n";
    }
    return clean ? kExitOk : kExitValidation;
}

struct InferOptions {
    std::string out_dir;
    std::string rules;
    std::string inference_set_id{kDefaultInferenceSetId};
    std::string tool_name{kDefaultToolName};
    std::vector<std::string> files;
};

int cmd_infer(const InferOptions& opts, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<MappingSet> sets;
    for (const auto& file : opts.files) {
        try {
            sets.push_back(parse_mapping_file(read_file(file)));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Io) throw;
            throw Error(e.code(), file + ": " + e.what());
        }
    }
    const auto rules = load_rules(opts.rules);
    const auto release = materialize(std::move(sets), rules, InferenceStamp{opts.inference_set_id, opts.tool_name});
    write_release(release, opts.out_dir);
    out << stats_json(release.stats, false) << "\n";

    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    char line[128];
    std::snprintf(line, sizeof(line), "materialize: %.3f s, total: %.3f s\n", release.stats.wall_time_seconds, total);
    err << line;
    return kExitOk;
}

void render_tree(const ordered_json& node, int depth, std::ostream& out) {
    const auto& m = node.at("mapping");
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << m.at("subject_id").get<std::string>() << " "
        << m.at("predicate_id").get<std::string>() << " " << m.at("object_id").get<std::string>() << "  ";
    if (node.at("asserted").get<bool>()) {
        out << "[asserted in " << m.at("mapping_set_id").get<std::string>() << "]";
    } else {
        out << "[" << node.at("rule_id").get<std::string>() << "]";
    }
    out << " " << node.at("id").get<std::string>() << "\n";
    if (node.contains("premises")) {
        for (const auto& p : node.at("premises")) render_tree(p, depth + 1, out);
    }
}

int cmd_explain(const std::string& db, const std::string& id, bool as_json, std::ostream& out) {
    const Index index(load_release(db));
    const auto tree = index.explanation(MappingId{id});
    if (as_json) {
        out << tree.dump(2) << "\n";
    } else {
        render_tree(tree, 0, out);
    }
    return kExitOk;
}

struct SearchOptions {
    std::string db;
    std::vector<std::string> fields;
    std::string q;
    std::size_t page = 0;
    std::size_t size = kDefaultPageSize;
};

std::string tsv_cell(const std::optional<std::string>& value) { return value.value_or(""); }

int cmd_search(const SearchOptions& opts, std::ostream& out, std::ostream& err) {
    Query query;
    for (const auto& f : opts.fields) {
        const auto eq = f.find('=');
        if (eq == std::string::npos || eq == 0) {
            err << "error: --field expects key=value, got '" << f << "'\n";
            return kExitUsage;
        }
        query.field_filters[f.substr(0, eq)] = f.substr(eq + 1);
    }
    if (!opts.q.empty()) query.free_text = opts.q;
    query.page = opts.page;
    query.size = opts.size;

    const Index index(load_release(opts.db));
    const auto page = index.search(query);
    static constexpr std::string_view kColumns[] = {"id",           "subject_id",     "subject_label",
                                                    "predicate_id", "object_id",      "object_label",
                                                    "confidence",   "mapping_set_id", "inferred"};
    out << "# total: " << page.total << "\n";
    for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "\t" : "") << kColumns[i];
    out << "\n";
    for (const auto* doc : page.results) {
        for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "\t" : "") << tsv_cell(doc->field(kColumns[i]));
        out << "\n";
    }
    return kExitOk;
}

int cmd_serve(const std::string& db, const std::string& host, int port, const std::string& ui_dir, std::ostream& err) {
    auto index = std::make_shared<const Index>(load_release(db));
    Service service(index, ui_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(ui_dir));
    const int bound = service.bind(host, port);
    err << "serving " << index->size() << " mappings on http://" << host << ":" << bound << "\n";
    err.flush();
    service.listen();
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ontology mapping crosswalk: validate, materialize, explain, search and serve SSSOM mappings",
                 "crosswalk"};
    app.require_subcommand(1, 1);

    auto* validate = app.add_subcommand("validate", "Parse and validate SSSOM files");
    std::vector<std::string> validate_files;
    validate->add_option("files", validate_files, "SSSOM/TSV files")->required();

    auto* infer = app.add_subcommand("infer", "Materialize inferred mappings and write a release");
    InferOptions infer_opts;
    infer->add_option("--out", infer_opts.out_dir, "Release directory")->required();
    infer->add_option("--rules", infer_opts.rules, "Rule file (default: $CROSSWALK_RULES, then bundled rules)");
    infer->add_option("--inference-set-id", infer_opts.inference_set_id, "Mapping set id of inferred mappings");
    infer->add_option("--tool-name", infer_opts.tool_name, "mapping_tool of inferred mappings");
    infer->add_option("files", infer_opts.files, "SSSOM/TSV files")->required();

    auto* explain = app.add_subcommand("explain", "Print the explanation of a mapping");
    std::string explain_db, explain_id;
    bool explain_json = false;
    explain->add_option("--db", explain_db, "Release directory")->required();
    explain->add_flag("--json", explain_json, "Emit JSON");
    explain->add_option("mapping_id", explain_id, "Mapping id")->required();

    auto* search = app.add_subcommand("search", "Search a release");
    SearchOptions search_opts;
    search->add_option("--db", search_opts.db, "Release directory")->required();
    search->add_option("--field", search_opts.fields, "Exact field filter key=value (repeatable)");
    search->add_option("--q", search_opts.q, "Case-insensitive label substring");
    search->add_option("--page", search_opts.page, "Page number, from 0");
    search->add_option("--size", search_opts.size, "Page size, 1 to 500");

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    std::string serve_db, serve_host = "127.0.0.1", serve_ui;
    int serve_port = 0;
    serve->add_option("--db", serve_db, "Release directory")->required();
    serve->add_option("--port", serve_port, "TCP port (0 picks a free one)")->required();
    serve->add_option("--host", serve_host, "Bind address");
    serve->add_option("--ui-dir", serve_ui, "Static UI assets served at /");

    auto* cost = app.add_subcommand("estimate-cost", "Print k^d * n^2 for query-time crosswalks");
    double terms = 0, degree = 0;
    int distance = 0;
    cost->add_option("--terms", terms, "Number of terms n")->required();
    cost->add_option("--degree", degree, "Average mapping degree k")->required();
    cost->add_option("--distance", distance, "Path distance d")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*validate) return cmd_validate(validate_files, out);
        if (*infer) return cmd_infer(infer_opts, out, err);
        if (*explain) return cmd_explain(explain_db, explain_id, explain_json, out);
        if (*search) return cmd_search(search_opts, out, err);
        if (*serve) return cmd_serve(serve_db, serve_host, serve_port, serve_ui, err);
        if (*cost) {
            out << format_cost(estimate_crosswalk_cost(terms, degree, distance)) << "\n";
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}

} // namespace crosswalk

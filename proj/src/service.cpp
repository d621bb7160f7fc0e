#include "crosswalk/service.hpp"

#include "crosswalk/error.hpp"

#include <httplib.h>

#include <charconv>

namespace crosswalk {

using nlohmann::ordered_json;

namespace {

constexpr std::string_view kApiRoot = "/api/v1";

ApiResponse json_response(int status, const ordered_json& body) { return {status, body.dump()}; }

ApiResponse error_response(int status, std::string_view error, std::string_view detail) {
    ordered_json body;
    body["error"] = error;
    body["detail"] = detail;
    return json_response(status, body);
}

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::UnknownField:
    case ErrorCode::Validation: return 400;
    default: return 500;
    }
}

std::size_t parse_count(std::string_view name, const std::string& text) {
    std::size_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::Validation, std::string(name) + " must be a non-negative integer, got '" + text + "'");
    }
    return value;
}

Query parse_query(const std::multimap<std::string, std::string>& params) {
    Query query;
    for (const auto& [key, value] : params) {
        if (params.count(key) > 1) throw Error(ErrorCode::Validation, "parameter '" + key + "' given more than once");
        if (key == "q") {
            if (!value.empty()) query.free_text = value;
        } else if (key == "page") {
            query.page = parse_count("page", value);
        } else if (key == "size") {
            query.size = parse_count("size", value);
        } else {
            query.field_filters[key] = value;
        }
    }
    return query;
}

ApiResponse route(const Index& index, std::string_view path, const std::multimap<std::string, std::string>& params) {
    if (path == "/health") {
        ordered_json body;
        body["status"] = "ok";
        body["mappings"] = index.size();
        body["inferred"] = index.inferred_count();
        return json_response(200, body);
    }
    if (path == "/mappings") return json_response(200, to_json(index.search(parse_query(params))));

    constexpr std::string_view kMappings = "/mappings/";
    if (path.substr(0, kMappings.size()) == kMappings) {
        auto rest = path.substr(kMappings.size());
        bool explanation = false;
        constexpr std::string_view kExplanation = "/explanation";
        if (rest.size() > kExplanation.size() && rest.substr(rest.size() - kExplanation.size()) == kExplanation) {
            rest.remove_suffix(kExplanation.size());
            explanation = true;
        }
        if (!rest.empty() && rest.find('/') == std::string_view::npos) {
            const MappingId id{std::string(rest)};
            if (explanation) return json_response(200, index.explanation(id));
            if (const auto* doc = index.find(id)) return json_response(200, to_json(*doc));
            throw Error(ErrorCode::NotFound, "no mapping with id " + id.value);
        }
    }

    if (path == "/mapping_sets") {
        ordered_json body;
        body["total"] = index.mapping_sets().size();
        body["results"] = ordered_json::array();
        for (const auto& set : index.mapping_sets()) body["results"].push_back(to_json(set));
        return json_response(200, body);
    }
    constexpr std::string_view kSets = "/mapping_sets/";
    if (path.substr(0, kSets.size()) == kSets && path.size() > kSets.size()) {
        const auto id = path.substr(kSets.size());
        if (const auto* set = index.find_set(id)) return json_response(200, to_json(*set));
        throw Error(ErrorCode::NotFound, "no mapping set with id " + std::string(id));
    }
    throw Error(ErrorCode::NotFound, "no route for " + std::string(kApiRoot) + std::string(path));
}

} // namespace

ApiResponse handle_api_get(const Index& index, std::string_view path,
                           const std::multimap<std::string, std::string>& params) {
    if (path.substr(0, kApiRoot.size()) != kApiRoot) {
        return error_response(404, to_string(ErrorCode::NotFound), "no route for " + std::string(path));
    }
    try {
        return route(index, path.substr(kApiRoot.size()), params);
    } catch (const Error& e) {
        return error_response(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

Service::Service(std::shared_ptr<const Index> index, std::optional<std::filesystem::path> ui_assets)
    : index_(std::move(index)), server_(std::make_unique<httplib::Server>()) {
    server_->set_default_headers({
        {"Access-Control-Allow-Origin", "*"},
        {"Access-Control-Allow-Methods", "GET, OPTIONS"},
        {"Access-Control-Allow-Headers", "Content-Type"},
    });
    server_->Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server_->Get(R"(/api/v1(/.*)?)", [this](const httplib::Request& req, httplib::Response& res) {
        std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
        auto reply = handle_api_get(*index_, req.path, params);
        res.status = reply.status;
        res.set_content(reply.body, "application/json; charset=utf-8");
    });
    if (ui_assets) {
        if (!server_->set_mount_point("/", ui_assets->string())) {
            throw Error(ErrorCode::Io, "UI assets directory " + ui_assets->string() + " not found");
        }
    }
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void Service::listen() { server_->listen_after_bind(); }

void Service::start() {
    thread_ = std::thread([this] { listen(); });
    server_->wait_until_ready();
}

void Service::stop() {
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

} // namespace crosswalk

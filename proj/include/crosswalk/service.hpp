#pragma once
// Read-only HTTP/JSON API over an Index.

#include "crosswalk/index.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

namespace httplib {
class Server;
}

namespace crosswalk {

struct ApiResponse {
    int status = 200;
    std::string body;
};

// Routes a GET under /api/v1 without any socket. Errors come back as
// {"error", "detail"} with status 400 or 404.
ApiResponse handle_api_get(const Index& index, std::string_view path,
                           const std::multimap<std::string, std::string>& params);

class Service {
public:
    explicit Service(std::shared_ptr<const Index> index, std::optional<std::filesystem::path> ui_assets = {});
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Port 0 picks a free port. Returns the bound port; throws Error(Io).
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void listen();
    // Runs listen() on a background thread.
    void start();
    void stop();

private:
    std::shared_ptr<const Index> index_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

} // namespace crosswalk

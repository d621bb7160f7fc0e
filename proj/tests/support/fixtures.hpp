#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crosswalk::testing {

std::filesystem::path fixture_path(std::string_view name);
std::string read_fixture(std::string_view name);
std::filesystem::path tool_path();

// Unique directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(std::string_view tag = "crosswalk");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, std::string_view text);

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
    double seconds = 0.0;
    long max_rss_kb = 0;
};

// Runs the crosswalk tool as a child process. `env` entries override the
// inherited environment; a nullopt value removes the variable.
ProcessResult run_tool(const std::vector<std::string>& args,
                       const std::map<std::string, std::optional<std::string>>& env = {});

} // namespace crosswalk::testing

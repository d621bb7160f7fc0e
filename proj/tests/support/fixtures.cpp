#include "support/fixtures.hpp"

#include "crosswalk/materializer.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <fstream>
#include <random>
#include <stdexcept>

extern char** environ;

namespace crosswalk::testing {

namespace fs = std::filesystem;

fs::path fixture_path(std::string_view name) { return fs::path(CROSSWALK_FIXTURE_DIR) / name; }

std::string read_fixture(std::string_view name) { return read_file(fixture_path(name)); }

fs::path tool_path() { return fs::path(CROSSWALK_TOOL_PATH); }

TempDir::TempDir(std::string_view tag) {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto candidate = fs::temp_directory_path() /
                         (std::string(tag) + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
                          std::to_string(rd() % 100000));
        if (fs::create_directory(candidate)) {
            path_ = candidate;
            return;
        }
    }
    throw std::runtime_error("cannot create temporary directory");
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

ProcessResult run_tool(const std::vector<std::string>& args,
                       const std::map<std::string, std::optional<std::string>>& env) {
    TempDir scratch("crosswalk-run");
    const auto out_path = scratch / "stdout";
    const auto err_path = scratch / "stderr";

    std::vector<std::string> argv_storage{tool_path().string()};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());
    argv.push_back(nullptr);

    std::vector<std::string> env_storage;
    for (char** e = environ; *e; ++e) {
        std::string entry(*e);
        const auto key = entry.substr(0, entry.find('='));
        if (!env.count(key)) env_storage.push_back(std::move(entry));
    }
    for (const auto& [key, value] : env) {
        if (value) env_storage.push_back(key + "=" + *value);
    }
    std::vector<char*> envp;
    for (auto& e : env_storage) envp.push_back(e.data());
    envp.push_back(nullptr);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);

    const auto started = std::chrono::steady_clock::now();
    pid_t pid = 0;
    const int rc = posix_spawn(&pid, argv[0], &actions, nullptr, argv.data(), envp.data());
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) throw std::runtime_error("cannot spawn " + argv_storage[0]);

    int status = 0;
    struct rusage usage {};
    if (::wait4(pid, &status, 0, &usage) < 0) throw std::runtime_error("wait4 failed");

    ProcessResult result;
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.max_rss_kb = usage.ru_maxrss;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    return result;
}

} // namespace crosswalk::testing

#pragma once

#include <sys/types.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace prf::process {

struct Spec {
    std::vector<std::string> argv;
    std::filesystem::path cwd;
    /// Variables added to (or replacing entries of) the parent environment.
    std::vector<std::pair<std::string, std::string>> env;
    std::filesystem::path stdout_path;
    std::filesystem::path stderr_path;
    std::optional<std::chrono::milliseconds> budget;
};

enum class Status { Exited, Signaled, TimedOut, SpawnFailed };

struct Result {
    Status status = Status::SpawnFailed;
    int exit_code = -1;
    int signal = 0;
    std::int64_t duration_ms = 0;
    /// Process group of the child; the whole group has been sent SIGKILL by the time
    /// run() returns.
    pid_t process_group = -1;
    std::string spawn_error;
};

/// Runs one child in a fresh process group, with stdin from /dev/null and stdout/stderr
/// redirected to the given files. When the budget elapses first the group is killed.
/// Safe to call from several threads at once.
Result run(const Spec& spec);

/// True while any non-zombie process still belongs to `pgid`.
bool group_alive(pid_t pgid);

/// Splits a command line on whitespace. No quoting is interpreted.
std::vector<std::string> split_command(const std::string& command);

std::string read_file(const std::filesystem::path& path);

}  // namespace prf::process

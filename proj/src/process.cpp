#include "prf/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

extern char** environ;

namespace prf::process {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point since) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
}

std::vector<std::string> build_environment(
    const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::map<std::string, std::string> vars;
    for (char** e = environ; e && *e; ++e) {
        std::string_view entry(*e);
        const auto eq = entry.find('=');
        if (eq == std::string_view::npos) continue;
        vars[std::string(entry.substr(0, eq))] = std::string(entry.substr(eq + 1));
    }
    for (const auto& [k, v] : overrides) vars[k] = v;

    std::vector<std::string> out;
    out.reserve(vars.size());
    for (const auto& [k, v] : vars) out.push_back(k + "=" + v);
    return out;
}

std::vector<char*> as_c_array(std::vector<std::string>& strings) {
    std::vector<char*> out;
    out.reserve(strings.size() + 1);
    for (auto& s : strings) out.push_back(s.data());
    out.push_back(nullptr);
    return out;
}

class FileActions {
public:
    FileActions() { posix_spawn_file_actions_init(&actions_); }
    ~FileActions() { posix_spawn_file_actions_destroy(&actions_); }
    FileActions(const FileActions&) = delete;
    FileActions& operator=(const FileActions&) = delete;
    posix_spawn_file_actions_t* get() { return &actions_; }

private:
    posix_spawn_file_actions_t actions_;
};

class SpawnAttr {
public:
    SpawnAttr() { posix_spawnattr_init(&attr_); }
    ~SpawnAttr() { posix_spawnattr_destroy(&attr_); }
    SpawnAttr(const SpawnAttr&) = delete;
    SpawnAttr& operator=(const SpawnAttr&) = delete;
    posix_spawnattr_t* get() { return &attr_; }

private:
    posix_spawnattr_t attr_;
};

void kill_group(pid_t pgid) {
    if (pgid > 0) ::kill(-pgid, SIGKILL);
}

/// Waits for `pid` until `deadline` (if any). Returns the wait status, or nullopt on
/// deadline expiry.
std::optional<int> wait_until(pid_t pid, std::optional<Clock::time_point> deadline) {
    const int pidfd = static_cast<int>(::syscall(SYS_pidfd_open, pid, 0));
    while (true) {
        int status = 0;
        const pid_t r = ::waitpid(pid, &status, deadline ? WNOHANG : 0);
        if (r == pid) {
            if (pidfd >= 0) ::close(pidfd);
            return status;
        }
        if (r < 0 && errno != EINTR) {
            if (pidfd >= 0) ::close(pidfd);
            return 255 << 8;  // lost track of the child; report as an adapter error
        }
        if (!deadline) continue;

        const auto now = Clock::now();
        if (now >= *deadline) {
            if (pidfd >= 0) ::close(pidfd);
            return std::nullopt;
        }
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - now).count() + 1;
        if (pidfd >= 0) {
            pollfd pfd{pidfd, POLLIN, 0};
            ::poll(&pfd, 1, static_cast<int>(remaining));
        } else {
            std::this_thread::sleep_for(std::chrono::milliseconds(std::min<std::int64_t>(remaining, 2)));
        }
    }
}

}  // namespace

Result run(const Spec& spec) {
    Result result;
    if (spec.argv.empty()) {
        result.spawn_error = "empty command";
        return result;
    }

    std::vector<std::string> argv = spec.argv;
    std::filesystem::path program(argv[0]);
    if (program.has_parent_path() && program.is_relative() && !spec.cwd.empty()) {
        argv[0] = std::filesystem::absolute(spec.cwd / program).lexically_normal().string();
    }
    auto c_argv = as_c_array(argv);
    auto env_strings = build_environment(spec.env);
    auto c_env = as_c_array(env_strings);

    FileActions actions;
    posix_spawn_file_actions_addopen(actions.get(), STDIN_FILENO, "/dev/null", O_RDONLY, 0);
    const std::string out_path = spec.stdout_path.empty() ? "/dev/null" : spec.stdout_path.string();
    const std::string err_path = spec.stderr_path.empty() ? "/dev/null" : spec.stderr_path.string();
    posix_spawn_file_actions_addopen(actions.get(), STDOUT_FILENO, out_path.c_str(),
                                     O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_addopen(actions.get(), STDERR_FILENO, err_path.c_str(),
                                     O_WRONLY | O_CREAT | O_TRUNC, 0644);
    const std::string cwd = spec.cwd.string();
    if (!cwd.empty()) posix_spawn_file_actions_addchdir_np(actions.get(), cwd.c_str());

    SpawnAttr attr;
    sigset_t no_signals;
    sigemptyset(&no_signals);
    sigset_t default_signals;
    sigemptyset(&default_signals);
    sigaddset(&default_signals, SIGPIPE);
    sigaddset(&default_signals, SIGINT);
    sigaddset(&default_signals, SIGTERM);
    posix_spawnattr_setflags(attr.get(), POSIX_SPAWN_SETPGROUP | POSIX_SPAWN_SETSIGMASK |
                                             POSIX_SPAWN_SETSIGDEF);
    posix_spawnattr_setpgroup(attr.get(), 0);
    posix_spawnattr_setsigmask(attr.get(), &no_signals);
    posix_spawnattr_setsigdefault(attr.get(), &default_signals);

    const auto start = Clock::now();
    pid_t pid = -1;
    const int rc = ::posix_spawnp(&pid, c_argv[0], actions.get(), attr.get(), c_argv.data(),
                                  c_env.data());
    if (rc != 0) {
        result.spawn_error = "cannot spawn '" + spec.argv[0] + "': " + std::strerror(rc);
        result.duration_ms = elapsed_ms(start);
        return result;
    }
    result.process_group = pid;

    std::optional<Clock::time_point> deadline;
    if (spec.budget) deadline = start + *spec.budget;

    const auto status = wait_until(pid, deadline);
    if (!status) {
        kill_group(pid);
        wait_until(pid, std::nullopt);
        result.status = Status::TimedOut;
        result.duration_ms = std::max<std::int64_t>(elapsed_ms(start), spec.budget->count());
        return result;
    }

    result.duration_ms = elapsed_ms(start);
    // Reap stragglers the test may have left behind.
    kill_group(pid);
    if (WIFEXITED(*status)) {
        result.status = Status::Exited;
        result.exit_code = WEXITSTATUS(*status);
    } else if (WIFSIGNALED(*status)) {
        result.status = Status::Signaled;
        result.signal = WTERMSIG(*status);
    }
    return result;
}

bool group_alive(pid_t pgid) {
    if (pgid <= 0) return false;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator("/proc", ec)) {
        const auto name = entry.path().filename().string();
        if (name.empty() || name.find_first_not_of("0123456789") != std::string::npos) continue;
        std::ifstream stat(entry.path() / "stat");
        std::string line;
        if (!std::getline(stat, line)) continue;
        // Fields after the parenthesised command: state ppid pgrp ...
        const auto close = line.rfind(')');
        if (close == std::string::npos) continue;
        std::istringstream rest(line.substr(close + 1));
        char state = 0;
        long ppid = 0;
        long pgrp = 0;
        rest >> state >> ppid >> pgrp;
        if (pgrp == pgid && state != 'Z' && state != 'X') return true;
    }
    return false;
}

std::vector<std::string> split_command(const std::string& command) {
    std::vector<std::string> out;
    std::istringstream in(command);
    std::string word;
    while (in >> word) out.push_back(word);
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace prf::process

// Synthetic project adapter used by the test suites.
//
// Reads fixture.json from the working directory:
//   {"tests": [{"name", "sleep_ms", "fails", "coverage": [...]}],
//    "list_exit": 0, "duplicate_listing": false, "record_pids": false}
// and, when PRF_PATCH_ROOT is set, <patch>/patch.json:
//   {"fixes": [...], "breaks": [...], "hangs": [...], "errors": [...],
//    "spawn_child": false, "sleep_ms": {"test": ms}}

#include <json.hpp>

#include <signal.h>
#include <sys/types.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int g_poisoned = 0;

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "fixture: cannot read " << path << "\n";
        std::exit(2);
    }
    return json::parse(in);
}

bool contains(const json& doc, const char* key, const std::string& name) {
    if (!doc.contains(key)) return false;
    for (const auto& n : doc.at(key)) {
        if (n.get<std::string>() == name) return true;
    }
    return false;
}

[[noreturn]] void hang(bool spawn_child) {
    if (spawn_child && ::fork() == 0) {
        while (true) std::this_thread::sleep_for(std::chrono::seconds(1));
    }
    std::atomic<unsigned long> spin{0};
    while (true) spin.fetch_add(1, std::memory_order_relaxed);
}

int list_tests(const json& fixture) {
    if (fixture.value("list_exit", 0) != 0) {
        std::cerr << "fixture: list-tests configured to fail\n";
        return fixture.value("list_exit", 0);
    }
    for (const auto& t : fixture.at("tests")) std::cout << t.at("name").get<std::string>() << "\n";
    if (fixture.value("duplicate_listing", false) && !fixture.at("tests").empty()) {
        std::cout << fixture.at("tests").at(0).at("name").get<std::string>() << "\n";
    }
    return 0;
}

int poison_test(const fs::path& state) {
    g_poisoned = 1;
    fs::create_directories(state);
    std::ofstream(state / ("poison-" + std::to_string(::getpid()))) << g_poisoned;
    std::ofstream(state / "last-poisoner") << ::getpid();
    return 0;
}

int isolation_check(const fs::path& state) {
    if (g_poisoned != 0) return 1;
    std::ifstream in(state / "last-poisoner");
    pid_t poisoner = 0;
    if (!(in >> poisoner)) return 0;
    if (poisoner == ::getpid()) return 1;
    // The poisoning process must be gone entirely.
    if (::kill(poisoner, 0) == 0) return 1;
    return fs::exists(state / ("poison-" + std::to_string(::getpid()))) ? 1 : 0;
}

int run_test(const json& fixture, const std::string& name) {
    const json* test = nullptr;
    for (const auto& t : fixture.at("tests")) {
        if (t.at("name").get<std::string>() == name) test = &t;
    }
    if (!test) {
        std::cerr << "fixture: unknown test " << name << "\n";
        return 2;
    }

    if (fixture.value("record_pids", false)) {
        fs::create_directories("state");
        std::ofstream("state/pids.log", std::ios::app) << ::getpid() << "\n";
    }

    const char* cov = std::getenv("PRF_COVERAGE_FILE");
    if (cov && *cov) {
        std::ofstream out(cov);
        if (test->contains("coverage")) {
            for (const auto& e : test->at("coverage")) out << e.get<std::string>() << "\n";
        }
    }

    const std::string kind = test->value("kind", "");
    if (kind == "poison") return poison_test("state");
    if (kind == "isolation-check") return isolation_check("state");

    bool fails = test->value("fails", false);
    int sleep_ms = test->value("sleep_ms", 0);

    const char* patch_root = std::getenv("PRF_PATCH_ROOT");
    if (patch_root && *patch_root) {
        const json patch = read_json(fs::path(patch_root) / "patch.json");
        if (contains(patch, "errors", name)) return 3;
        if (contains(patch, "hangs", name)) hang(patch.value("spawn_child", false));
        if (contains(patch, "fixes", name)) fails = false;
        if (contains(patch, "breaks", name)) fails = true;
        if (patch.contains("sleep_ms") && patch.at("sleep_ms").contains(name)) {
            sleep_ms = patch.at("sleep_ms").at(name).get<int>();
        }
    }

    if (sleep_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
    std::cout << name << (fails ? " FAILED" : " passed") << "\n";
    return fails ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: fixture_adapter list-tests | run-test <id>\n";
        return 2;
    }
    try {
        const json fixture = read_json("fixture.json");
        const std::string cmd = argv[1];
        if (cmd == "list-tests") return list_tests(fixture);
        if (cmd == "run-test" && argc == 3) return run_test(fixture, argv[2]);
    } catch (const std::exception& e) {
        std::cerr << "fixture: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "fixture: bad arguments\n";
    return 2;
}

#include "fixture_project.hpp"

#include "prf/cli.hpp"
#include "prf/io.hpp"

#include <json.hpp>

#include <atomic>
#include <random>
#include <unistd.h>

namespace prf::testing {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path fixture_adapter_path() { return PRF_FIXTURE_ADAPTER; }

TempDir::TempDir(const std::string& prefix) {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            (prefix + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
             std::to_string(rd()));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

namespace {

json to_json(const FixtureTest& t) {
    json j = {{"name", t.name}, {"sleep_ms", t.sleep_ms}, {"fails", t.fails}, {"coverage", t.coverage}};
    if (!t.kind.empty()) j["kind"] = t.kind;
    return j;
}

json to_json(const FixturePatch& p) {
    return {{"fixes", p.fixes},   {"breaks", p.breaks},       {"hangs", p.hangs},
            {"errors", p.errors}, {"spawn_child", p.spawn_child}, {"sleep_ms", p.sleep_ms}};
}

}  // namespace

fs::path write_config_file(const fs::path& root, const std::string& config_json) {
    json cfg = json::parse(config_json);
    if (!cfg.contains("adapterCommand")) cfg["adapterCommand"] = fixture_adapter_path().string();
    const auto path = root / "prf.json";
    io::write_text(path, cfg.dump(2) + "\n");
    return path;
}

RepairConfig write_fixture(const fs::path& root, const FixtureProject& project,
                           const std::string& config_json) {
    json tests = json::array();
    for (const auto& t : project.tests) tests.push_back(to_json(t));
    const json fixture = {{"tests", tests},
                          {"list_exit", project.list_exit},
                          {"duplicate_listing", project.duplicate_listing},
                          {"record_pids", project.record_pids}};
    io::write_text(root / "fixture.json", fixture.dump(2) + "\n");

    const fs::path pool = root / "patches-pool";
    fs::create_directories(pool);
    for (const auto& p : project.patches) {
        const fs::path dir = pool / p.id;
        io::write_text(dir / "patch.json", to_json(p).dump(2) + "\n");
        if (p.manifest) {
            std::string text;
            for (const auto& t : *p.manifest) text += t + "\n";
            io::write_text(dir / "covering-tests.txt", text);
        }
    }
    return load_config(write_config_file(root, config_json));
}

FixtureProject calculator_project() {
    FixtureProject p;
    p.tests = {
        {"test_add", 12, false, {"src/calc.c:add:3", "src/calc.c:add:4"}},
        {"test_add_negative", 15, false, {"src/calc.c:add:3", "src/calc.c:add:4"}},
        {"test_sub", 18, false, {"src/calc.c:sub:8", "src/calc.c:sub:9"}},
        {kCalculatorFailingTest, 25, true, {"src/calc.c:sub:8", "src/calc.c:sub:10"}},
        {"test_mul", 10, false, {"src/calc.c:mul:14"}},
        {"test_div", 20, false, {"src/calc.c:div:18", "src/calc.c:div:20"}},
        {"test_div_zero", 14, false, {"src/calc.c:div:18", "src/calc.c:div:19"}},
        {"test_mod", 11, false, {"src/calc.c:mod:24"}},
    };

    FixturePatch swap;
    swap.id = "p1_swap_operands";
    swap.breaks = {"test_sub"};
    swap.manifest = std::vector<std::string>{"test_sub", kCalculatorFailingTest};

    FixturePatch correct;
    correct.id = kCalculatorCorrectPatch;
    correct.fixes = {kCalculatorFailingTest};
    correct.manifest = std::vector<std::string>{"test_sub", kCalculatorFailingTest};

    FixturePatch loop;
    loop.id = kCalculatorLoopingPatch;
    loop.hangs = {kCalculatorFailingTest};
    loop.spawn_child = true;
    loop.manifest = std::vector<std::string>{"test_sub", kCalculatorFailingTest};

    FixturePatch break_mul;
    break_mul.id = "p4_breaks_mul";
    break_mul.fixes = {kCalculatorFailingTest};
    break_mul.breaks = {"test_mul"};

    FixturePatch noop;
    noop.id = "p5_noop";

    FixturePatch div;
    div.id = "p6_breaks_div_zero";
    div.fixes = {kCalculatorFailingTest};
    div.breaks = {"test_div_zero"};

    p.patches = {swap, correct, loop, break_mul, noop, div};
    return p;
}

FixtureProject sleep_workload(int patches) {
    FixtureProject p;
    p.tests.push_back({"t_short", 150, false, {}});
    p.tests.push_back({"t_long", 600, false, {}});
    for (int i = 0; i < 4; ++i) p.tests.push_back({"t_other" + std::to_string(i), 5, false, {}});
    for (int i = 0; i < patches; ++i) {
        FixturePatch patch;
        char id[16];
        std::snprintf(id, sizeof id, "w%02d", i);
        patch.id = id;
        patch.manifest = std::vector<std::string>{i % 8 == 0 ? "t_long" : "t_short"};
        p.patches.push_back(patch);
    }
    return p;
}

}  // namespace prf::testing

#include "prf/cli.hpp"

#include "prf/error.hpp"
#include "prf/fault_localization.hpp"
#include "prf/fix_report.hpp"
#include "prf/io.hpp"
#include "prf/patch_pool.hpp"
#include "prf/patch_validator.hpp"
#include "prf/profiler.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <set>

namespace prf {

namespace fs = std::filesystem;
using nlohmann::json;

Granularity parse_granularity(const std::string& text) {
    if (text == "OFF") return Granularity::Off;
    if (text == "FILE" || text == "CLASS_LEVEL") return Granularity::File;
    if (text == "FUNCTION" || text == "METHOD_LEVEL") return Granularity::Function;
    if (text == "LINE" || text == "LINE_LEVEL") return Granularity::Line;
    throw Error(ErrorKind::Configuration, "unknown flOptions value '" + text + "'");
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "adapterCommand", "flOptions",     "flStrategy",
        "testCoverage",   "failingTests",  "cgOptions",
        "patchGenerationPlugin", "parallelism", "patchPrioritizationPlugin",
        "timeoutConstant", "timeoutPercent", "earlyStop",
        "patchesDir"};
    return keys;
}

template <typename T>
T get_as(const json& doc, const char* key, const char* expected) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorKind::Configuration,
                    std::string("'") + key + "' must be " + expected + ", got " + doc.at(key).dump());
    }
}

std::int64_t get_non_negative(const json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw Error(ErrorKind::Configuration,
                    std::string("'") + key + "' must be a non-negative integer, got " + v.dump());
    }
    return v.get<std::int64_t>();
}

}  // namespace

RepairConfig parse_config(const std::string& json_text, const fs::path& project_root) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Configuration, std::string("malformed configuration: ") + e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorKind::Configuration, "configuration must be a JSON object");
    }

    std::vector<std::string> unknown;
    for (const auto& [key, value] : doc.items()) {
        if (!known_keys().count(key)) unknown.push_back(key);
    }
    if (!unknown.empty()) {
        std::string msg = "unknown configuration key(s):";
        for (const auto& k : unknown) msg += " " + k;
        throw Error(ErrorKind::Configuration, msg);
    }

    RepairConfig c;
    c.project_root = project_root;
    if (doc.contains("adapterCommand")) c.adapter_command = get_as<std::string>(doc, "adapterCommand", "a string");
    if (doc.contains("flOptions")) c.fl_option = parse_granularity(get_as<std::string>(doc, "flOptions", "a string"));
    if (doc.contains("flStrategy")) {
        const auto s = get_as<std::string>(doc, "flStrategy", "a string");
        if (s == "OCHIAI") {
            c.fl_strategy = FlStrategy::Ochiai;
        } else if (s == "TARANTULA") {
            c.fl_strategy = FlStrategy::Tarantula;
        } else {
            throw Error(ErrorKind::Configuration, "unknown flStrategy '" + s + "'");
        }
    }
    if (doc.contains("testCoverage")) c.test_coverage = get_as<bool>(doc, "testCoverage", "a boolean");
    if (doc.contains("failingTests")) {
        for (const auto& name : get_as<std::vector<std::string>>(doc, "failingTests", "a list of strings")) {
            c.failing_tests.emplace_back(name);
        }
    }
    if (doc.contains("cgOptions")) {
        const auto s = get_as<std::string>(doc, "cgOptions", "a string");
        if (s == "DYNAMIC") {
            throw Error(ErrorKind::Configuration, "dynamic call graph construction is out of scope");
        }
        if (s != "OFF") throw Error(ErrorKind::Configuration, "unknown cgOptions value '" + s + "'");
    }
    if (doc.contains("patchGenerationPlugin")) {
        c.patch_generation_plugin = get_as<std::string>(doc, "patchGenerationPlugin", "a string");
    }
    if (doc.contains("parallelism")) c.parallelism = static_cast<unsigned>(get_non_negative(doc, "parallelism"));
    if (doc.contains("patchPrioritizationPlugin")) {
        c.patch_prioritization_plugin = get_as<std::string>(doc, "patchPrioritizationPlugin", "a string");
    }
    if (doc.contains("timeoutConstant")) c.timeout.beta_ms = get_non_negative(doc, "timeoutConstant");
    if (doc.contains("timeoutPercent")) {
        const auto& v = doc.at("timeoutPercent");
        if (!v.is_number() || v.get<double>() < 0.0) {
            throw Error(ErrorKind::Configuration,
                        "'timeoutPercent' must be a non-negative number, got " + v.dump());
        }
        c.timeout.alpha = v.get<double>();
    }
    if (doc.contains("earlyStop")) c.early_stop = get_as<bool>(doc, "earlyStop", "a boolean");
    if (doc.contains("patchesDir")) c.patches_dir = get_as<std::string>(doc, "patchesDir", "a string");
    return c;
}

RepairConfig load_config(const fs::path& path) {
    if (!fs::is_regular_file(path)) {
        throw Error(ErrorKind::Configuration, "configuration file '" + path.string() + "' not found");
    }
    return parse_config(io::read_text(path), fs::absolute(path).parent_path());
}

namespace {

/// Runs one pipeline stage, prefixing any failure with the stage name.
template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(name) + ": " + to_string(e.kind()) + ": " + e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorKind::Infrastructure, std::string(name) + ": " + e.what());
    }
}

template <typename F>
int guarded(CommandStreams io, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        io.err << "prf: " << e.what() << "\n";
        return kExitError;
    }
}

TestIdSet known_tests(const Profile& profile) {
    TestIdSet ids;
    for (const auto& r : profile.tests) ids.insert(r.id);
    return ids;
}

Profile profile_stage(const RepairConfig& config, CommandStreams io) {
    return stage("profile", [&] {
        Profile p = profile_project(config);
        save_profile(p, config.work_dir());
        for (const auto& w : p.warnings) io.err << "prf: warning: " << w << "\n";
        io.out << "profiled " << p.tests.size() << " test(s), " << p.failing.size()
               << " failing\n";
        return p;
    });
}

void localize_stage(const RepairConfig& config, const Profile& profile, CommandStreams io) {
    stage("localize", [&] {
        const auto ranking = localize(profile, config);
        save_ranking(ranking, config.work_dir() / "ranking.csv");
        io.out << "ranked " << ranking.entries.size() << " element(s) with "
               << to_string(config.fl_strategy) << " at " << to_string(config.fl_option)
               << " granularity\n";
    });
}

PatchPool generate_stage(const RepairConfig& config, const Profile& profile) {
    return stage("generate", [&] {
        return run_generation_plugin(config, default_plugin_context(config), known_tests(profile));
    });
}

ValidationReport validate_stage(const RepairConfig& config, const PatchPool& pool,
                                const Profile& profile, CommandStreams io) {
    return stage("validate", [&] {
        auto report = validate_pool(pool, profile, config);
        io.out << "validated " << report.verdicts.size() << " of " << pool.patches.size()
               << " patch(es) with " << report.workers << " worker(s) in " << report.wall_ms
               << " ms, " << report.tests_run_total << " test execution(s)"
               << (report.stopped_early ? ", stopped early" : "") << "\n";
        return report;
    });
}

int report_stage(const RepairConfig& config, const ValidationReport& report, const PatchPool& pool,
                 CommandStreams io) {
    return stage("report", [&] {
        const auto fix = generate_report(report, pool, config);
        save_fix_report(fix, config.work_dir());
        io.out << format_report_text(fix);
        return fix.entries.empty() ? kExitNoPlausible : kExitPlausible;
    });
}

}  // namespace

int cmd_run(const RepairConfig& config, CommandStreams io) {
    return guarded(io, [&] {
        const Profile profile = profile_stage(config, io);
        if (config.fl_option != Granularity::Off) localize_stage(config, profile, io);
        const PatchPool pool = generate_stage(config, profile);
        const auto report = validate_stage(config, pool, profile, io);
        return report_stage(config, report, pool, io);
    });
}

int cmd_profile(const RepairConfig& config, CommandStreams io) {
    return guarded(io, [&] {
        profile_stage(config, io);
        return 0;
    });
}

int cmd_localize(const RepairConfig& config, CommandStreams io) {
    return guarded(io, [&] {
        if (config.fl_option == Granularity::Off) {
            throw Error(ErrorKind::Configuration, "localize: flOptions is OFF");
        }
        const Profile profile = stage("localize", [&] { return load_profile(config.work_dir()); });
        localize_stage(config, profile, io);
        return 0;
    });
}

int cmd_validate(const RepairConfig& config, CommandStreams io) {
    return guarded(io, [&] {
        const Profile profile = stage("validate", [&] { return load_profile(config.work_dir()); });
        const PatchPool pool = generate_stage(config, profile);
        validate_stage(config, pool, profile, io);
        return 0;
    });
}

int cmd_report(const RepairConfig& config, CommandStreams io) {
    return guarded(io, [&] {
        const Profile profile = stage("report", [&] { return load_profile(config.work_dir()); });
        const PatchPool pool =
            stage("report", [&] { return load_pool(config.pool_root(), known_tests(profile)); });
        const auto report = stage("report", [&] { return load_verdicts(config.work_dir()); });
        return report_stage(config, report, pool, io);
    });
}

std::vector<BenchRow> run_bench(const RepairConfig& config, int repetitions) {
    if (repetitions < 1) throw Error(ErrorKind::Benchmark, "repetitions must be at least 1");
    const Profile profile = profile_project(config);
    save_profile(profile, config.work_dir());
    const PatchPool pool = run_generation_plugin(config, default_plugin_context(config),
                                                 known_tests(profile));
    if (pool.patches.empty()) throw Error(ErrorKind::Benchmark, "patch pool is empty");
    const ProjectAdapter adapter(config.adapter_command, config.project_root);

    struct Strategy {
        const char* name;
        bool select;
        bool reorder;
        unsigned parallelism;
    };
    const Strategy strategies[] = {
        {"vanilla", false, false, 1},
        {"reorder", false, true, 1},
        {"reorder+selection", true, true, 1},
        {"reorder+selection+parallel", true, true, resolve_worker_count(config.parallelism)},
    };

    std::vector<BenchRow> rows;
    for (const auto& s : strategies) {
        ValidationOptions options;
        options.select = s.select;
        options.reorder = s.reorder;
        options.parallelism = s.parallelism;
        options.early_stop = false;
        options.timeout = config.timeout;

        std::vector<std::int64_t> times;
        std::int64_t tests = 0;
        for (int rep = 0; rep < repetitions; ++rep) {
            const auto report = validate_pool(pool, profile, adapter, options,
                                              config.work_dir() / "scratch" / "bench");
            times.push_back(report.wall_ms);
            tests = report.tests_run_total;
        }
        std::sort(times.begin(), times.end());
        const auto n = times.size();
        const std::int64_t median = n % 2 ? times[n / 2] : (times[n / 2 - 1] + times[n / 2]) / 2;
        rows.push_back({s.name, median, 0.0, tests});
    }
    const double vanilla = static_cast<double>(std::max<std::int64_t>(rows.front().median_ms, 1));
    for (auto& r : rows) {
        r.speedup_vs_vanilla = vanilla / static_cast<double>(std::max<std::int64_t>(r.median_ms, 1));
    }
    return rows;
}

std::string format_bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "strategy,median_ms,speedup_vs_vanilla,tests_executed\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.3f", r.speedup_vs_vanilla);
        out += r.strategy + "," + std::to_string(r.median_ms) + "," + buf + "," +
               std::to_string(r.tests_executed) + "\n";
    }
    return out;
}

int cmd_bench(const RepairConfig& config, int repetitions, CommandStreams io) {
    return guarded(io, [&] {
        const auto rows = stage("bench", [&] { return run_bench(config, repetitions); });
        const auto csv = format_bench_csv(rows);
        io::write_text(config.work_dir() / "bench.csv", csv);
        io.out << csv;
        return 0;
    });
}

int cli_main(int argc, char** argv) {
    CLI::App app{"prf: generate-and-validate program repair orchestration"};
    app.require_subcommand(1);

    std::string config_path;
    int reps = 5;
    const auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        return sub;
    };
    auto* run = add("run", "profile, localize, generate, validate and report");
    auto* profile = add("profile", "run the suite on the unpatched program");
    auto* localize_cmd = add("localize", "rank program elements from the stored profile");
    auto* validate = add("validate", "generate the patch pool and validate it");
    auto* report = add("report", "build the fix report from stored verdicts");
    auto* bench = add("bench", "compare validation strategies on the patch pool");
    bench->add_option("--reps", reps, "repetitions per strategy")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    CommandStreams io{std::cout, std::cerr};
    RepairConfig config;
    try {
        config = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "prf: " << e.what() << "\n";
        return kExitError;
    }

    if (run->parsed()) return cmd_run(config, io);
    if (profile->parsed()) return cmd_profile(config, io);
    if (localize_cmd->parsed()) return cmd_localize(config, io);
    if (validate->parsed()) return cmd_validate(config, io);
    if (report->parsed()) return cmd_report(config, io);
    if (bench->parsed()) return cmd_bench(config, reps, io);
    return kExitError;
}

}  // namespace prf

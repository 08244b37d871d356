#include "prf/patch_pool.hpp"

#include "prf/error.hpp"
#include "prf/io.hpp"
#include "prf/process.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace prf {

namespace fs = std::filesystem;
using nlohmann::json;

const PatchEntry* PatchPool::find(const std::string& id) const {
    const auto it = std::find_if(patches.begin(), patches.end(),
                                 [&](const PatchEntry& p) { return p.id == id; });
    return it == patches.end() ? nullptr : &*it;
}

PluginContext default_plugin_context(const RepairConfig& config) {
    const fs::path root = fs::absolute(config.project_root).lexically_normal();
    PluginContext ctx;
    ctx.source_dir = root / "src";
    ctx.test_source_dir = root / "test";
    ctx.binaries_dir = root / "build";
    ctx.pool_root = fs::absolute(config.pool_root()).lexically_normal();
    const fs::path work = fs::absolute(config.work_dir()).lexically_normal();
    if (fs::exists(work / "ranking.csv")) ctx.ranking_file = work / "ranking.csv";
    if (fs::exists(work / "coverage.csv")) ctx.coverage_file = work / "coverage.csv";
    return ctx;
}

std::string serialize_plugin_context(const PluginContext& ctx) {
    const auto opt = [](const std::optional<fs::path>& p) -> json {
        return p ? json(p->string()) : json(nullptr);
    };
    const json doc = {{"source_dir", ctx.source_dir.string()},
                      {"test_source_dir", ctx.test_source_dir.string()},
                      {"binaries_dir", ctx.binaries_dir.string()},
                      {"ranking_file", opt(ctx.ranking_file)},
                      {"coverage_file", opt(ctx.coverage_file)},
                      {"pool_root", ctx.pool_root.string()}};
    return doc.dump(2) + "\n";
}

PluginContext parse_plugin_context(const std::string& text) {
    try {
        const json doc = json::parse(text);
        const auto opt = [&](const char* key) -> std::optional<fs::path> {
            if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
            return fs::path(doc.at(key).get<std::string>());
        };
        return {doc.at("source_dir").get<std::string>(),
                doc.at("test_source_dir").get<std::string>(),
                doc.at("binaries_dir").get<std::string>(),
                opt("ranking_file"),
                opt("coverage_file"),
                doc.at("pool_root").get<std::string>()};
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("malformed plugin context: ") + e.what());
    }
}

namespace {

TestIdSet read_manifest(const fs::path& file, const std::string& patch_id,
                        const TestIdSet& known_tests) {
    std::istringstream in(io::read_text(file));
    TestIdSet tests;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        TestId id(line);
        if (!known_tests.count(id)) {
            throw Error(ErrorKind::PoolLoad, "patch '" + patch_id + "' manifest names unknown test '" +
                                                 line + "'");
        }
        tests.insert(std::move(id));
    }
    if (tests.empty()) {
        throw Error(ErrorKind::PoolLoad,
                    "patch '" + patch_id + "' has an empty " + kCoveringTestsManifest +
                        "; a patch no test covers cannot be validated");
    }
    return tests;
}

bool has_artifact(const fs::path& dir) {
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().parent_path() == dir && entry.path().filename() == kCoveringTestsManifest) {
            continue;
        }
        return true;
    }
    return false;
}

}  // namespace

PatchPool load_pool(const fs::path& pool_root, const TestIdSet& known_tests) {
    if (!fs::is_directory(pool_root)) {
        throw Error(ErrorKind::PoolLoad, "patch pool '" + pool_root.string() + "' is not a directory");
    }
    PatchPool pool;
    pool.root = pool_root;
    try {
        for (const auto& entry : fs::directory_iterator(pool_root)) {
            if (!entry.is_directory()) continue;
            PatchEntry patch;
            patch.root = entry.path();
            patch.id = entry.path().filename().string();
            if (!has_artifact(patch.root)) {
                throw Error(ErrorKind::PoolLoad,
                            "patch '" + patch.id + "' contains no patch artifact files");
            }
            const auto manifest = patch.root / kCoveringTestsManifest;
            if (fs::is_regular_file(manifest)) {
                patch.covering_tests = read_manifest(manifest, patch.id, known_tests);
            }
            pool.patches.push_back(std::move(patch));
        }
    } catch (const fs::filesystem_error& e) {
        throw Error(ErrorKind::PoolLoad, std::string("cannot read patch pool: ") + e.what());
    }
    std::sort(pool.patches.begin(), pool.patches.end(),
              [](const PatchEntry& a, const PatchEntry& b) { return a.id < b.id; });
    return pool;
}

PatchPool run_generation_plugin(const RepairConfig& config, const PluginContext& ctx,
                                const TestIdSet& known_tests) {
    fs::create_directories(ctx.pool_root);

    if (config.patch_generation_plugin != kDummyGenerationPlugin) {
        const fs::path context_file = fs::absolute(config.work_dir() / "plugin-context.json");
        io::write_text(context_file, serialize_plugin_context(ctx));

        process::Spec spec;
        spec.argv = process::split_command(config.patch_generation_plugin);
        spec.argv.push_back(context_file.string());
        spec.cwd = config.project_root;
        spec.stdout_path = config.work_dir() / "generation-plugin.out";
        spec.stderr_path = config.work_dir() / "generation-plugin.err";
        const auto r = process::run(spec);
        if (r.status != process::Status::Exited || r.exit_code != 0) {
            std::string why = r.status == process::Status::SpawnFailed
                                  ? r.spawn_error
                                  : "exit status " + std::to_string(r.exit_code);
            throw Error(ErrorKind::Generation,
                        "patch generation plugin '" + config.patch_generation_plugin +
                            "' failed (" + why + ")\n" + process::read_file(spec.stdout_path) +
                            process::read_file(spec.stderr_path));
        }
    }

    PatchPool pool = load_pool(ctx.pool_root, known_tests);
    if (pool.patches.empty()) {
        throw Error(ErrorKind::Generation,
                    "no patches generated in '" + ctx.pool_root.string() + "'");
    }
    return pool;
}

}  // namespace prf

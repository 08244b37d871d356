#pragma once

#include "prf/core_model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace prf {

/// Name of the optional per-patch manifest listing the tests that cover the patched location.
inline constexpr const char* kCoveringTestsManifest = "covering-tests.txt";

struct PatchPool {
    std::filesystem::path root;
    std::vector<PatchEntry> patches;  // ascending by id

    const PatchEntry* find(const std::string& id) const;

    friend bool operator==(const PatchPool&, const PatchPool&) = default;
};

/// What a generation plugin is told about the project. Serialized as JSON.
struct PluginContext {
    std::filesystem::path source_dir;
    std::filesystem::path test_source_dir;
    std::filesystem::path binaries_dir;
    std::optional<std::filesystem::path> ranking_file;
    std::optional<std::filesystem::path> coverage_file;
    std::filesystem::path pool_root;

    friend bool operator==(const PluginContext&, const PluginContext&) = default;
};

/// Context with the conventional project layout: src/, test/, build/ and the configured pool.
PluginContext default_plugin_context(const RepairConfig& config);

std::string serialize_plugin_context(const PluginContext& ctx);
PluginContext parse_plugin_context(const std::string& text);

/// Each immediate sub-directory of `pool_root` is one patch; its name is the patch id.
PatchPool load_pool(const std::filesystem::path& pool_root, const TestIdSet& known_tests);

/// Runs the configured generation plugin (the built-in dummy only scans the pool) and loads
/// the resulting pool.
PatchPool run_generation_plugin(const RepairConfig& config, const PluginContext& ctx,
                                const TestIdSet& known_tests);

}  // namespace prf

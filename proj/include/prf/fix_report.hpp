#pragma once

#include "prf/core_model.hpp"
#include "prf/patch_pool.hpp"
#include "prf/patch_validator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace prf {

struct FixReportEntry {
    std::string patch_id;
    int rank = 0;
    std::string verdict;  // always PLAUSIBLE
    std::int64_t tests_executed = 0;
    std::int64_t wall_ms = 0;

    friend bool operator==(const FixReportEntry&, const FixReportEntry&) = default;
};

struct FixReport {
    std::vector<FixReportEntry> entries;  // ranks 1..n
    std::string plugin_used;
    std::string summary;
    bool stopped_early = false;

    friend bool operator==(const FixReport&, const FixReport&) = default;
};

/// Keeps the plausible patches and lets the prioritization plugin reorder or drop them.
/// The built-in dummy plugin keeps pool order.
FixReport generate_report(const ValidationReport& report, const PatchPool& pool,
                          const RepairConfig& config);

/// Checks an external plugin's answer: every line must name a distinct candidate.
std::vector<std::string> parse_prioritized_ids(const std::string& plugin_output,
                                               const std::vector<std::string>& candidates);

std::string format_report_text(const FixReport& report);
std::string serialize_fix_report(const FixReport& report);
void save_fix_report(const FixReport& report, const std::filesystem::path& work_dir);

}  // namespace prf

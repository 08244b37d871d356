#pragma once

#include "prf/core_model.hpp"
#include "prf/patch_pool.hpp"
#include "prf/profiler.hpp"
#include "prf/project_adapter.hpp"
#include "prf/work_stealing.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace prf {

/// beta + round((1 + alpha) * tau), in milliseconds.
std::int64_t compute_timeout(std::int64_t tau_ms, const TimeoutPolicy& policy);

/// Tests named by the patch's covering-tests manifest, or the whole suite without one.
/// Suite order is preserved.
std::vector<TestRecord> select_tests(const PatchEntry& patch, const std::vector<TestRecord>& all_tests);

/// Originally failing first, then shorter first, then by id. Stable.
std::vector<TestRecord> order_tests(std::vector<TestRecord> tests);

struct PlannedTest {
    TestId id;
    std::int64_t budget_ms = 0;

    friend bool operator==(const PlannedTest&, const PlannedTest&) = default;
};

struct ValidationPlan {
    PatchEntry patch;
    std::vector<PlannedTest> tests;
};

/// Knobs the benchmark varies; a normal run keeps selection and reordering on.
struct ValidationOptions {
    bool select = true;
    bool reorder = true;
    unsigned parallelism = 0;  // 0: all cores
    bool early_stop = false;
    TimeoutPolicy timeout;
};

ValidationOptions validation_options(const RepairConfig& config);

/// 0 means one worker per core (at least one).
unsigned resolve_worker_count(unsigned requested, unsigned cores);
unsigned resolve_worker_count(unsigned requested);

ValidationPlan make_plan(const PatchEntry& patch, const Profile& profile,
                         const ValidationOptions& options);

/// Runs the plan's tests in order, each in a fresh adapter process under its budget, and
/// stops at the first test that fails, times out or breaks the adapter.
ValidationVerdict validate_patch(const ValidationPlan& plan, const ProjectAdapter& adapter,
                                 const std::filesystem::path& scratch);

struct ValidationReport {
    std::map<std::string, ValidationVerdict> verdicts;
    bool stopped_early = false;
    std::int64_t wall_ms = 0;
    std::int64_t tests_run_total = 0;
    unsigned workers = 1;
    /// Scheduler events; `task` indexes the pool's patch list.
    std::vector<SchedulerEvent> events;
};

/// Validates every patch of the pool on a work-stealing worker pool.
ValidationReport validate_pool(const PatchPool& pool, const Profile& profile,
                               const ProjectAdapter& adapter, const ValidationOptions& options,
                               const std::filesystem::path& scratch_root);

/// Convenience entry point: adapter, options and scratch space come from the config; the
/// report and event log are written under the work directory.
ValidationReport validate_pool(const PatchPool& pool, const Profile& profile,
                               const RepairConfig& config);

std::string format_event_log(const ValidationReport& report, const PatchPool& pool);

// verdicts.json and validation-log.jsonl under the work directory.
void save_validation(const ValidationReport& report, const PatchPool& pool,
                     const std::filesystem::path& work_dir);
ValidationReport load_verdicts(const std::filesystem::path& work_dir);

}  // namespace prf

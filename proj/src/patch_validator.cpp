#include "prf/patch_validator.hpp"

#include "prf/error.hpp"
#include "prf/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

namespace prf {

namespace fs = std::filesystem;
using nlohmann::json;

std::int64_t compute_timeout(std::int64_t tau_ms, const TimeoutPolicy& policy) {
    if (tau_ms < 0) {
        throw Error(ErrorKind::Contract, "test duration must be non-negative");
    }
    return policy.beta_ms + std::llround((1.0 + policy.alpha) * static_cast<double>(tau_ms));
}

std::vector<TestRecord> select_tests(const PatchEntry& patch, const std::vector<TestRecord>& all_tests) {
    if (!patch.covering_tests) return all_tests;
    std::vector<TestRecord> out;
    for (const auto& r : all_tests) {
        if (patch.covering_tests->count(r.id)) out.push_back(r);
    }
    return out;
}

std::vector<TestRecord> order_tests(std::vector<TestRecord> tests) {
    std::stable_sort(tests.begin(), tests.end(), [](const TestRecord& a, const TestRecord& b) {
        const bool a_fail = a.status == TestStatus::Failing;
        const bool b_fail = b.status == TestStatus::Failing;
        if (a_fail != b_fail) return a_fail;
        if (a.duration_ms != b.duration_ms) return a.duration_ms < b.duration_ms;
        return a.id < b.id;
    });
    return tests;
}

ValidationOptions validation_options(const RepairConfig& config) {
    ValidationOptions o;
    o.parallelism = config.parallelism;
    o.early_stop = config.early_stop;
    o.timeout = config.timeout;
    return o;
}

unsigned resolve_worker_count(unsigned requested, unsigned cores) {
    if (requested != 0) return requested;
    return std::max(1u, cores);
}

unsigned resolve_worker_count(unsigned requested) {
    return resolve_worker_count(requested, std::thread::hardware_concurrency());
}

ValidationPlan make_plan(const PatchEntry& patch, const Profile& profile,
                         const ValidationOptions& options) {
    std::vector<TestRecord> tests = options.select ? select_tests(patch, profile.tests) : profile.tests;
    if (options.reorder) tests = order_tests(std::move(tests));

    ValidationPlan plan{patch, {}};
    plan.tests.reserve(tests.size());
    for (const auto& r : tests) {
        plan.tests.push_back({r.id, compute_timeout(r.duration_ms, options.timeout)});
    }
    return plan;
}

ValidationVerdict validate_patch(const ValidationPlan& plan, const ProjectAdapter& adapter,
                                 const fs::path& scratch) {
    const auto start = std::chrono::steady_clock::now();
    const auto wall = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    };

    std::int64_t executed = 0;
    for (const auto& planned : plan.tests) {
        const auto exec = adapter.run_test(planned.id, plan.patch.root, planned.budget_ms,
                                           /*want_coverage=*/false, scratch);
        ++executed;
        switch (exec.outcome) {
            case TestOutcome::Passed:
                continue;
            case TestOutcome::Failed:
                return ValidationVerdict::test_failed(plan.patch.id, planned.id, executed, wall());
            case TestOutcome::TimedOut:
                return ValidationVerdict::timed_out(plan.patch.id, planned.id, executed, wall());
            case TestOutcome::AdapterError:
                return ValidationVerdict::infra_error(plan.patch.id, planned.id, executed, wall(),
                                                      exec.error);
        }
    }
    return ValidationVerdict::plausible(plan.patch.id, executed, wall());
}

ValidationReport validate_pool(const PatchPool& pool, const Profile& profile,
                               const ProjectAdapter& adapter, const ValidationOptions& options,
                               const fs::path& scratch_root) {
    if (pool.patches.empty()) {
        throw Error(ErrorKind::Contract, "cannot validate an empty patch pool");
    }
    const unsigned workers = resolve_worker_count(options.parallelism);

    std::vector<ValidationPlan> plans;
    plans.reserve(pool.patches.size());
    for (const auto& patch : pool.patches) plans.push_back(make_plan(patch, profile, options));

    std::vector<std::optional<ValidationVerdict>> results(plans.size());
    std::mutex results_mutex;

    const auto body = [&](unsigned worker, std::size_t task) -> bool {
        const auto& plan = plans[task];
        std::optional<ValidationVerdict> verdict;
        try {
            const fs::path scratch = scratch_root / ("worker-" + std::to_string(worker));
            verdict = validate_patch(plan, adapter, scratch);
        } catch (const std::exception& e) {
            verdict = ValidationVerdict::infra_error(plan.patch.id, std::nullopt, 0, 0,
                                                     std::string("worker failure: ") + e.what());
        }
        const bool plausible = verdict->kind() == VerdictKind::Plausible;
        {
            std::lock_guard lock(results_mutex);
            results[task] = std::move(verdict);
        }
        return options.early_stop && plausible;
    };

    const auto start = std::chrono::steady_clock::now();
    auto schedule = run_work_stealing(plans.size(), workers, body);

    ValidationReport report;
    report.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    report.workers = workers;
    report.stopped_early = schedule.stopped;
    report.events = std::move(schedule.events);
    for (auto& r : results) {
        if (!r) continue;
        report.tests_run_total += r->tests_executed();
        const std::string id = r->patch_id();
        report.verdicts.emplace(id, std::move(*r));
    }
    return report;
}

ValidationReport validate_pool(const PatchPool& pool, const Profile& profile,
                               const RepairConfig& config) {
    const ProjectAdapter adapter(config.adapter_command, config.project_root);
    auto report = validate_pool(pool, profile, adapter, validation_options(config),
                                config.work_dir() / "scratch");
    save_validation(report, pool, config.work_dir());
    return report;
}

std::string format_event_log(const ValidationReport& report, const PatchPool& pool) {
    std::string out;
    for (const auto& e : report.events) {
        json line = {{"event", to_string(e.kind)}, {"worker", e.worker}, {"t_ms", e.t_ms}};
        if (e.kind != SchedulerEventKind::Exit) {
            const auto& id = pool.patches.at(e.task).id;
            line["patch"] = id;
            if (e.kind == SchedulerEventKind::End) {
                if (const auto it = report.verdicts.find(id); it != report.verdicts.end()) {
                    line["verdict"] = to_string(it->second.kind());
                    line["tests_executed"] = it->second.tests_executed();
                }
            }
        }
        if (e.kind == SchedulerEventKind::Steal) {
            line["victim"] = e.victim;
            line["victim_remaining"] = e.pending;
        }
        if (e.kind == SchedulerEventKind::Exit) line["pending"] = e.pending;
        out += line.dump();
        out += '\n';
    }
    return out;
}

void save_validation(const ValidationReport& report, const PatchPool& pool, const fs::path& work_dir) {
    json verdicts = json::array();
    for (const auto& patch : pool.patches) {
        const auto it = report.verdicts.find(patch.id);
        if (it == report.verdicts.end()) continue;
        const auto& v = it->second;
        json entry = {{"patch_id", v.patch_id()},
                      {"kind", to_string(v.kind())},
                      {"culprit_test", v.culprit_test() ? json(v.culprit_test()->str()) : json(nullptr)},
                      {"tests_executed", v.tests_executed()},
                      {"wall_ms", v.wall_ms()}};
        if (!v.detail().empty()) entry["detail"] = v.detail();
        verdicts.push_back(std::move(entry));
    }
    const json doc = {{"verdicts", verdicts},
                      {"stopped_early", report.stopped_early},
                      {"wall_ms", report.wall_ms},
                      {"tests_run_total", report.tests_run_total},
                      {"workers", report.workers}};
    io::write_text(work_dir / "verdicts.json", doc.dump(2) + "\n");
    io::write_text(work_dir / "validation-log.jsonl", format_event_log(report, pool));
}

ValidationReport load_verdicts(const fs::path& work_dir) {
    const auto path = work_dir / "verdicts.json";
    ValidationReport report;
    try {
        const json doc = json::parse(io::read_text(path));
        for (const auto& v : doc.at("verdicts")) {
            const auto id = v.at("patch_id").get<std::string>();
            const auto kind = parse_verdict_kind(v.at("kind").get<std::string>());
            const auto executed = v.at("tests_executed").get<std::int64_t>();
            const auto wall = v.at("wall_ms").get<std::int64_t>();
            std::optional<TestId> culprit;
            if (!v.at("culprit_test").is_null()) culprit = TestId(v.at("culprit_test").get<std::string>());
            const auto culprit_or_throw = [&] {
                if (!culprit) throw Error(ErrorKind::Parse, "verdict for '" + id + "' lacks a culprit test");
                return *culprit;
            };
            switch (kind) {
                case VerdictKind::Plausible:
                    if (culprit) throw Error(ErrorKind::Parse, "plausible verdict for '" + id + "' names a culprit");
                    report.verdicts.emplace(id, ValidationVerdict::plausible(id, executed, wall));
                    break;
                case VerdictKind::TestFailed:
                    report.verdicts.emplace(id, ValidationVerdict::test_failed(id, culprit_or_throw(), executed, wall));
                    break;
                case VerdictKind::TimedOut:
                    report.verdicts.emplace(id, ValidationVerdict::timed_out(id, culprit_or_throw(), executed, wall));
                    break;
                case VerdictKind::InfraError:
                    report.verdicts.emplace(id, ValidationVerdict::infra_error(id, culprit, executed, wall,
                                                                               v.value("detail", "")));
                    break;
            }
        }
        report.stopped_early = doc.at("stopped_early").get<bool>();
        report.wall_ms = doc.at("wall_ms").get<std::int64_t>();
        report.tests_run_total = doc.at("tests_run_total").get<std::int64_t>();
        report.workers = doc.value("workers", 1u);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, "malformed '" + path.string() + "': " + e.what());
    }
    return report;
}

}  // namespace prf

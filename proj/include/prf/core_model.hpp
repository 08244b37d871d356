#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace prf {

/// Identifier of one test, as reported by the project adapter.
/// Non-empty and free of line breaks so it can live in line-oriented manifests.
class TestId {
public:
    explicit TestId(std::string name);

    const std::string& str() const noexcept { return name_; }

    friend auto operator<=>(const TestId&, const TestId&) = default;
    friend bool operator==(const TestId&, const TestId&) = default;

private:
    std::string name_;
};

using TestIdSet = std::set<TestId>;

enum class TestStatus { Passing, Failing };

struct TestRecord {
    TestId id;
    TestStatus status = TestStatus::Passing;
    std::int64_t duration_ms = 0;

    friend bool operator==(const TestRecord&, const TestRecord&) = default;
};

enum class Granularity { File, Function, Line, Off };

const char* to_string(Granularity g) noexcept;
const char* to_string(TestStatus s) noexcept;

/// A location in the program under repair at file, function or line granularity.
/// The canonical textual form is "file[:function][:line]".
class ProgramElement {
public:
    static ProgramElement file(std::string path);
    static ProgramElement function(std::string path, std::string function);
    static ProgramElement line(std::string path, std::string function, std::int64_t line);

    const std::string& file_path() const noexcept { return file_; }
    const std::optional<std::string>& function_name() const noexcept { return function_; }
    std::optional<std::int64_t> line_number() const noexcept { return line_; }
    Granularity granularity() const noexcept { return granularity_; }

    /// Coarsens this element to `target`, which must not be finer than the element itself.
    ProgramElement project(Granularity target) const;

    std::string format() const;

    friend auto operator<=>(const ProgramElement&, const ProgramElement&) = default;
    friend bool operator==(const ProgramElement&, const ProgramElement&) = default;

private:
    ProgramElement() = default;

    std::string file_;
    std::optional<std::string> function_;
    std::optional<std::int64_t> line_;
    Granularity granularity_ = Granularity::File;
};

/// Parses the canonical form. Surrounding whitespace is ignored; the field count must
/// match the granularity exactly (FILE: 1, FUNCTION: 2, LINE: 3).
ProgramElement parse_element(std::string_view text, Granularity granularity);

using ElementSet = std::set<ProgramElement>;

/// Per-test covered elements. Collected at LINE granularity; coarsened copies carry
/// coarser elements.
using CoverageMatrix = std::map<TestId, ElementSet>;

struct SpectrumCounts {
    std::int64_t failed_covering = 0;   // e_f
    std::int64_t passed_covering = 0;   // e_p
    std::int64_t total_failed = 0;      // F
    std::int64_t total_passed = 0;      // P

    bool well_formed() const noexcept {
        return failed_covering >= 0 && passed_covering >= 0 &&
               failed_covering <= total_failed && passed_covering <= total_passed;
    }

    friend bool operator==(const SpectrumCounts&, const SpectrumCounts&) = default;
};

struct PatchEntry {
    std::string id;
    std::filesystem::path root;
    std::optional<TestIdSet> covering_tests;
    std::map<std::string, std::string> metadata;

    friend bool operator==(const PatchEntry&, const PatchEntry&) = default;
};

enum class VerdictKind { Plausible, TestFailed, TimedOut, InfraError };

const char* to_string(VerdictKind kind) noexcept;
VerdictKind parse_verdict_kind(std::string_view text);

/// Outcome of validating one patch. Only the named constructors build verdicts, so a
/// culprit test is present exactly for TEST_FAILED and TIMED_OUT.
class ValidationVerdict {
public:
    static ValidationVerdict plausible(std::string patch_id, std::int64_t tests_executed,
                                       std::int64_t wall_ms);
    static ValidationVerdict test_failed(std::string patch_id, TestId culprit,
                                         std::int64_t tests_executed, std::int64_t wall_ms);
    static ValidationVerdict timed_out(std::string patch_id, TestId culprit,
                                       std::int64_t tests_executed, std::int64_t wall_ms);
    /// `culprit` is the test whose execution broke the adapter, when there was one.
    static ValidationVerdict infra_error(std::string patch_id, std::optional<TestId> culprit,
                                         std::int64_t tests_executed, std::int64_t wall_ms,
                                         std::string detail = {});

    const std::string& patch_id() const noexcept { return patch_id_; }
    VerdictKind kind() const noexcept { return kind_; }
    const std::optional<TestId>& culprit_test() const noexcept { return culprit_; }
    std::int64_t tests_executed() const noexcept { return tests_executed_; }
    std::int64_t wall_ms() const noexcept { return wall_ms_; }
    const std::string& detail() const noexcept { return detail_; }

    friend bool operator==(const ValidationVerdict&, const ValidationVerdict&) = default;

private:
    ValidationVerdict(std::string patch_id, VerdictKind kind, std::optional<TestId> culprit,
                      std::int64_t tests_executed, std::int64_t wall_ms, std::string detail);

    std::string patch_id_;
    VerdictKind kind_;
    std::optional<TestId> culprit_;
    std::int64_t tests_executed_;
    std::int64_t wall_ms_;
    std::string detail_;
};

struct TimeoutPolicy {
    std::int64_t beta_ms = 5000;
    double alpha = 0.5;

    friend bool operator==(const TimeoutPolicy&, const TimeoutPolicy&) = default;
};

enum class FlStrategy { Ochiai, Tarantula };

const char* to_string(FlStrategy s) noexcept;

inline constexpr std::string_view kDummyGenerationPlugin = "dummy-patch-generation-plugin";
inline constexpr std::string_view kDummyPrioritizationPlugin = "dummy-patch-prioritization-plugin";

struct RepairConfig {
    /// Directory the adapter runs in; relative paths in the config resolve against it.
    std::filesystem::path project_root = ".";
    std::string adapter_command;
    Granularity fl_option = Granularity::Off;
    FlStrategy fl_strategy = FlStrategy::Ochiai;
    bool test_coverage = false;
    std::vector<TestId> failing_tests;
    std::string patch_generation_plugin{kDummyGenerationPlugin};
    unsigned parallelism = 0;
    std::string patch_prioritization_plugin{kDummyPrioritizationPlugin};
    TimeoutPolicy timeout;
    bool early_stop = false;
    std::filesystem::path patches_dir = "patches-pool";

    std::filesystem::path work_dir() const { return project_root / ".prf"; }
    std::filesystem::path pool_root() const { return project_root / patches_dir; }
    bool wants_coverage() const { return test_coverage || fl_option != Granularity::Off; }

    friend bool operator==(const RepairConfig&, const RepairConfig&) = default;
};

}  // namespace prf

template <>
struct std::hash<prf::TestId> {
    std::size_t operator()(const prf::TestId& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};

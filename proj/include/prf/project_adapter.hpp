#pragma once

#include "prf/core_model.hpp"

#include <sys/types.h>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace prf {

/// Environment variable naming the patch overlay directory (empty for the original program).
inline constexpr const char* kPatchRootEnv = "PRF_PATCH_ROOT";
/// Environment variable naming the file the adapter writes covered elements to.
inline constexpr const char* kCoverageFileEnv = "PRF_COVERAGE_FILE";

enum class TestOutcome { Passed, Failed, TimedOut, AdapterError };

const char* to_string(TestOutcome outcome) noexcept;

struct TestExecution {
    TestId test;
    TestOutcome outcome = TestOutcome::AdapterError;
    std::int64_t duration_ms = 0;
    std::optional<ElementSet> covered;
    std::string output;  // stdout followed by stderr; diagnostics only
    std::string error;   // why the outcome is ADAPTER_ERROR
    pid_t process_group = -1;
};

/// Client side of the adapter protocol:
///   <adapter> list-tests          test ids on stdout, one per line
///   <adapter> run-test <test-id>  exit 0 pass, 1 fail, >= 2 error
class ProjectAdapter {
public:
    /// `scratch` receives captured output and coverage side-files; concurrent run_test
    /// callers must use distinct scratch directories.
    ProjectAdapter(std::string command, std::filesystem::path project_root);

    std::vector<TestId> discover_tests(const std::filesystem::path& scratch) const;

    TestExecution run_test(const TestId& test, const std::optional<std::filesystem::path>& patch_root,
                           std::optional<std::int64_t> budget_ms, bool want_coverage,
                           const std::filesystem::path& scratch) const;

    const std::string& command() const noexcept { return command_; }
    const std::filesystem::path& project_root() const noexcept { return project_root_; }

private:
    std::string command_;
    std::vector<std::string> argv_;
    std::filesystem::path project_root_;
};

/// Parses a coverage side-file: one LINE-granularity element per line, blank lines ignored.
ElementSet parse_coverage_lines(const std::string& text);

}  // namespace prf

#include "prf/project_adapter.hpp"

#include "prf/error.hpp"
#include "prf/process.hpp"

#include <cctype>
#include <sstream>

namespace prf {

const char* to_string(TestOutcome outcome) noexcept {
    switch (outcome) {
        case TestOutcome::Passed: return "PASSED";
        case TestOutcome::Failed: return "FAILED";
        case TestOutcome::TimedOut: return "TIMED_OUT";
        case TestOutcome::AdapterError: return "ADAPTER_ERROR";
    }
    return "?";
}

namespace {

std::string describe_exit(const process::Result& r) {
    switch (r.status) {
        case process::Status::Exited: return "exit status " + std::to_string(r.exit_code);
        case process::Status::Signaled: return "killed by signal " + std::to_string(r.signal);
        case process::Status::TimedOut: return "timed out";
        case process::Status::SpawnFailed: return r.spawn_error;
    }
    return "unknown";
}

std::string captured(const std::filesystem::path& out, const std::filesystem::path& err) {
    std::string text = process::read_file(out);
    const std::string e = process::read_file(err);
    if (!e.empty()) {
        if (!text.empty() && text.back() != '\n') text += '\n';
        text += e;
    }
    return text;
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        out += ok ? c : '_';
    }
    return out.substr(0, 64);
}

}  // namespace

ElementSet parse_coverage_lines(const std::string& text) {
    ElementSet out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.insert(parse_element(line, Granularity::Line));
    }
    return out;
}

ProjectAdapter::ProjectAdapter(std::string command, std::filesystem::path project_root)
    : command_(std::move(command)),
      argv_(process::split_command(command_)),
      project_root_(std::move(project_root)) {
    if (argv_.empty()) {
        throw Error(ErrorKind::Configuration, "adapter command is empty");
    }
}

std::vector<TestId> ProjectAdapter::discover_tests(const std::filesystem::path& scratch) const {
    std::filesystem::create_directories(scratch);
    process::Spec spec;
    spec.argv = argv_;
    spec.argv.push_back("list-tests");
    spec.cwd = project_root_;
    spec.env = {{kPatchRootEnv, ""}};
    spec.stdout_path = scratch / "list-tests.out";
    spec.stderr_path = scratch / "list-tests.err";

    const auto r = process::run(spec);
    const std::string out = process::read_file(spec.stdout_path);
    if (r.status != process::Status::Exited || r.exit_code != 0) {
        throw Error(ErrorKind::Infrastructure,
                    "adapter '" + command_ + " list-tests' failed (" + describe_exit(r) + ")\n" +
                        captured(spec.stdout_path, spec.stderr_path));
    }

    std::vector<TestId> tests;
    TestIdSet seen;
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        TestId id(line);
        if (!seen.insert(id).second) {
            throw Error(ErrorKind::Infrastructure,
                        "duplicate test id '" + line + "' reported by adapter\n" + out);
        }
        tests.push_back(std::move(id));
    }
    return tests;
}

TestExecution ProjectAdapter::run_test(const TestId& test,
                                       const std::optional<std::filesystem::path>& patch_root,
                                       std::optional<std::int64_t> budget_ms, bool want_coverage,
                                       const std::filesystem::path& scratch) const {
    std::filesystem::create_directories(scratch);
    const std::string stem = sanitize(test.str());
    const auto coverage_file = std::filesystem::absolute(scratch / (stem + ".coverage"));

    process::Spec spec;
    spec.argv = argv_;
    spec.argv.push_back("run-test");
    spec.argv.push_back(test.str());
    spec.cwd = project_root_;
    spec.env = {{kPatchRootEnv,
                 patch_root ? std::filesystem::absolute(*patch_root).string() : std::string()}};
    if (want_coverage) {
        std::filesystem::remove(coverage_file);
        spec.env.emplace_back(kCoverageFileEnv, coverage_file.string());
    } else {
        spec.env.emplace_back(kCoverageFileEnv, "");
    }
    spec.stdout_path = scratch / (stem + ".out");
    spec.stderr_path = scratch / (stem + ".err");
    if (budget_ms) spec.budget = std::chrono::milliseconds(*budget_ms);

    const auto r = process::run(spec);

    TestExecution exec{test};
    exec.duration_ms = r.duration_ms;
    exec.process_group = r.process_group;
    exec.output = captured(spec.stdout_path, spec.stderr_path);

    if (r.status == process::Status::TimedOut) {
        exec.outcome = TestOutcome::TimedOut;
        return exec;
    }
    if (r.status != process::Status::Exited || r.exit_code >= 2) {
        exec.outcome = TestOutcome::AdapterError;
        exec.error = "adapter run-test '" + test.str() + "': " + describe_exit(r);
        return exec;
    }
    exec.outcome = r.exit_code == 0 ? TestOutcome::Passed : TestOutcome::Failed;

    if (want_coverage) {
        try {
            exec.covered = std::filesystem::exists(coverage_file)
                               ? parse_coverage_lines(process::read_file(coverage_file))
                               : ElementSet{};
        } catch (const Error& e) {
            exec.outcome = TestOutcome::AdapterError;
            exec.error = "unparsable coverage file for '" + test.str() + "': " + e.what();
        }
    }
    return exec;
}

}  // namespace prf

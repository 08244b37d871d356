#include "prf/profiler.hpp"

#include "prf/error.hpp"
#include "prf/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace prf {

using nlohmann::json;

const TestRecord* Profile::find(const TestId& id) const {
    const auto it = std::find_if(tests.begin(), tests.end(),
                                 [&](const TestRecord& r) { return r.id == id; });
    return it == tests.end() ? nullptr : &*it;
}

FailingResolution resolve_failing_tests(const RepairConfig& config, const TestIdSet& observed,
                                        const std::vector<TestId>& discovered) {
    if (config.failing_tests.empty()) return {observed, std::nullopt};

    const TestIdSet known(discovered.begin(), discovered.end());
    TestIdSet configured;
    for (const auto& id : config.failing_tests) {
        if (!known.count(id)) {
            throw Error(ErrorKind::Configuration,
                        "failingTests names '" + id.str() + "', which the adapter did not report");
        }
        configured.insert(id);
    }

    FailingResolution out{configured, std::nullopt};
    if (configured != observed) {
        std::vector<TestId> diff;
        std::set_symmetric_difference(configured.begin(), configured.end(), observed.begin(),
                                      observed.end(), std::back_inserter(diff));
        std::string msg = "configured failing tests differ from observed failures:";
        for (const auto& id : diff) {
            msg += ' ' + id.str() + (configured.count(id) ? "(configured-only)" : "(observed-only)");
        }
        out.warning = std::move(msg);
    }
    return out;
}

Profile profile_project(const RepairConfig& config) {
    const ProjectAdapter adapter(config.adapter_command, config.project_root);
    return profile_project(config, adapter, config.work_dir() / "scratch" / "profile");
}

Profile profile_project(const RepairConfig& config, const ProjectAdapter& adapter,
                        const std::filesystem::path& scratch) {
    const std::vector<TestId> discovered = adapter.discover_tests(scratch);
    const bool want_coverage = config.wants_coverage();

    Profile profile;
    TestIdSet observed;
    if (want_coverage) profile.coverage.emplace();

    for (const auto& id : discovered) {
        const TestExecution exec = adapter.run_test(id, std::nullopt, std::nullopt, want_coverage, scratch);
        if (exec.outcome == TestOutcome::AdapterError || exec.outcome == TestOutcome::TimedOut) {
            throw Error(ErrorKind::Infrastructure,
                        "profiling aborted at test '" + id.str() + "': " + exec.error + "\n" +
                            exec.output);
        }
        const bool failed = exec.outcome == TestOutcome::Failed;
        if (failed) observed.insert(id);
        profile.tests.push_back({id, failed ? TestStatus::Failing : TestStatus::Passing,
                                 exec.duration_ms});
        if (want_coverage) (*profile.coverage)[id] = exec.covered.value_or(ElementSet{});
    }

    auto resolved = resolve_failing_tests(config, observed, discovered);
    profile.failing = std::move(resolved.failing);
    if (resolved.warning) profile.warnings.push_back(*resolved.warning);
    for (auto& record : profile.tests) {
        record.status = profile.failing.count(record.id) ? TestStatus::Failing : TestStatus::Passing;
    }
    return profile;
}

CoarseCoverage coarsen_coverage(const CoverageMatrix& matrix, Granularity g) {
    if (g == Granularity::Off) {
        throw Error(ErrorKind::Contract, "cannot coarsen coverage to granularity OFF");
    }
    CoarseCoverage out;
    for (const auto& [test, elements] : matrix) {
        auto& target = out[test];
        for (const auto& e : elements) target.insert(e.project(g));
    }
    return out;
}

Spectrum build_spectrum(const CoarseCoverage& coverage, const TestIdSet& failing,
                        const std::vector<TestRecord>& all_tests) {
    std::int64_t total_failed = 0;
    std::int64_t total_passed = 0;
    for (const auto& r : all_tests) {
        (failing.count(r.id) ? total_failed : total_passed) += 1;
    }

    Spectrum spectrum;
    for (const auto& r : all_tests) {
        const auto it = coverage.find(r.id);
        if (it == coverage.end()) continue;
        const bool is_failing = failing.count(r.id) > 0;
        for (const auto& e : it->second) {
            auto& c = spectrum[e];
            (is_failing ? c.failed_covering : c.passed_covering) += 1;
        }
    }
    for (auto& [e, c] : spectrum) {
        c.total_failed = total_failed;
        c.total_passed = total_passed;
    }
    return spectrum;
}

void save_profile(const Profile& profile, const std::filesystem::path& work_dir) {
    json tests = json::array();
    for (const auto& r : profile.tests) {
        tests.push_back({{"id", r.id.str()}, {"status", to_string(r.status)},
                         {"duration_ms", r.duration_ms}});
    }
    json failing = json::array();
    for (const auto& id : profile.failing) failing.push_back(id.str());

    const json doc = {{"tests", tests},
                      {"failing", failing},
                      {"coverage", profile.coverage.has_value()},
                      {"warnings", profile.warnings}};
    io::write_text(work_dir / "profile.json", doc.dump(2) + "\n");

    const auto coverage_path = work_dir / "coverage.csv";
    if (!profile.coverage) {
        std::filesystem::remove(coverage_path);
        return;
    }
    std::ostringstream csv;
    csv << "test_id,element\n";
    for (const auto& r : profile.tests) {
        const auto it = profile.coverage->find(r.id);
        if (it == profile.coverage->end()) continue;
        for (const auto& e : it->second) {
            csv << io::csv_field(r.id.str()) << ',' << io::csv_field(e.format()) << '\n';
        }
    }
    io::write_text(coverage_path, csv.str());
}

Profile load_profile(const std::filesystem::path& work_dir) {
    const auto path = work_dir / "profile.json";
    Profile profile;
    try {
        const json doc = json::parse(io::read_text(path));
        for (const auto& t : doc.at("tests")) {
            const auto status = t.at("status").get<std::string>();
            if (status != "FAILING" && status != "PASSING") {
                throw Error(ErrorKind::Parse, "unknown test status '" + status + "'");
            }
            profile.tests.push_back({TestId(t.at("id").get<std::string>()),
                                     status == "FAILING" ? TestStatus::Failing : TestStatus::Passing,
                                     t.at("duration_ms").get<std::int64_t>()});
        }
        for (const auto& id : doc.at("failing")) profile.failing.insert(TestId(id.get<std::string>()));
        if (doc.contains("warnings")) {
            profile.warnings = doc.at("warnings").get<std::vector<std::string>>();
        }
        if (doc.value("coverage", false)) {
            CoverageMatrix matrix;
            for (const auto& r : profile.tests) matrix[r.id];
            std::istringstream in(io::read_text(work_dir / "coverage.csv"));
            std::string line;
            bool header = true;
            while (std::getline(in, line)) {
                if (header) {
                    header = false;
                    continue;
                }
                if (line.empty()) continue;
                const auto fields = io::parse_csv_record(line);
                if (fields.size() != 2) {
                    throw Error(ErrorKind::Parse, "malformed coverage row '" + line + "'");
                }
                const TestId id(fields[0]);
                const auto it = matrix.find(id);
                if (it == matrix.end()) {
                    throw Error(ErrorKind::Parse, "coverage row names unknown test '" + fields[0] + "'");
                }
                it->second.insert(parse_element(fields[1], Granularity::Line));
            }
            profile.coverage = std::move(matrix);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, "malformed '" + path.string() + "': " + e.what());
    }
    return profile;
}

}  // namespace prf

#pragma once

#include "prf/core_model.hpp"
#include "prf/project_adapter.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prf {

struct Profile {
    std::vector<TestRecord> tests;
    std::optional<CoverageMatrix> coverage;
    TestIdSet failing;
    std::vector<std::string> warnings;

    const TestRecord* find(const TestId& id) const;

    friend bool operator==(const Profile&, const Profile&) = default;
};

struct FailingResolution {
    TestIdSet failing;
    std::optional<std::string> warning;
};

/// Configured failing tests win over observed ones; a disagreement yields a warning that
/// lists the symmetric difference.
FailingResolution resolve_failing_tests(const RepairConfig& config, const TestIdSet& observed,
                                        const std::vector<TestId>& discovered);

/// Runs every discovered test once, sequentially and without a budget, against the
/// unpatched program. Statuses in the result reflect the resolved failing set.
Profile profile_project(const RepairConfig& config);

/// Same, against an explicit adapter (the adapter's project root is used as-is).
Profile profile_project(const RepairConfig& config, const ProjectAdapter& adapter,
                        const std::filesystem::path& scratch);

using CoarseCoverage = std::map<TestId, ElementSet>;

/// Projects LINE-level coverage to `g` (FILE, FUNCTION or LINE).
CoarseCoverage coarsen_coverage(const CoverageMatrix& matrix, Granularity g);

using Spectrum = std::map<ProgramElement, SpectrumCounts>;

/// Tallies e_f/e_p per covered element. Tests missing from `coverage` cover nothing.
Spectrum build_spectrum(const CoarseCoverage& coverage, const TestIdSet& failing,
                        const std::vector<TestRecord>& all_tests);

// profile.json + coverage.csv under the work directory.
void save_profile(const Profile& profile, const std::filesystem::path& work_dir);
Profile load_profile(const std::filesystem::path& work_dir);

}  // namespace prf

#pragma once

#include "prf/core_model.hpp"
#include "prf/profiler.hpp"

#include <filesystem>
#include <vector>

namespace prf {

/// Ochiai: e_f / sqrt(F * (e_f + e_p)), 0 when e_f = 0 or the denominator vanishes.
double ochiai(const SpectrumCounts& c);

/// Tarantula: fr / (fr + pr) with fr = e_f/F and pr = e_p/P (each 0 on a zero total).
double tarantula(const SpectrumCounts& c);

double suspiciousness(FlStrategy strategy, const SpectrumCounts& c);

struct RankedElement {
    ProgramElement element;
    double score = 0.0;

    friend bool operator==(const RankedElement&, const RankedElement&) = default;
};

struct SuspiciousnessRanking {
    std::vector<RankedElement> entries;
    Granularity granularity = Granularity::Line;
    FlStrategy strategy = FlStrategy::Ochiai;

    friend bool operator==(const SuspiciousnessRanking&, const SuspiciousnessRanking&) = default;
};

/// Scores every element of `spectrum`, highest first; equal scores fall back to the
/// canonical element string.
SuspiciousnessRanking rank_spectrum(const Spectrum& spectrum, Granularity g, FlStrategy strategy);

/// Coarsens the profile's coverage to config.fl_option, builds spectra over the profile's
/// failing set and ranks them with config.fl_strategy.
SuspiciousnessRanking localize(const Profile& profile, const RepairConfig& config);

/// `element,score` rows, score printed with 6 decimals.
std::string format_ranking_csv(const SuspiciousnessRanking& ranking);
void save_ranking(const SuspiciousnessRanking& ranking, const std::filesystem::path& path);

}  // namespace prf

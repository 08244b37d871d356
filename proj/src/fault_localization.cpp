#include "prf/fault_localization.hpp"

#include "prf/error.hpp"
#include "prf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace prf {

double ochiai(const SpectrumCounts& c) {
    if (c.failed_covering == 0) return 0.0;
    const double denom = std::sqrt(static_cast<double>(c.total_failed) *
                                   static_cast<double>(c.failed_covering + c.passed_covering));
    if (denom == 0.0) return 0.0;
    return static_cast<double>(c.failed_covering) / denom;
}

double tarantula(const SpectrumCounts& c) {
    const double fr = c.total_failed == 0
                          ? 0.0
                          : static_cast<double>(c.failed_covering) / static_cast<double>(c.total_failed);
    const double pr = c.total_passed == 0
                          ? 0.0
                          : static_cast<double>(c.passed_covering) / static_cast<double>(c.total_passed);
    if (fr + pr == 0.0) return 0.0;
    return fr / (fr + pr);
}

double suspiciousness(FlStrategy strategy, const SpectrumCounts& c) {
    return strategy == FlStrategy::Ochiai ? ochiai(c) : tarantula(c);
}

SuspiciousnessRanking rank_spectrum(const Spectrum& spectrum, Granularity g, FlStrategy strategy) {
    struct Keyed {
        RankedElement ranked;
        std::string key;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(spectrum.size());
    for (const auto& [element, counts] : spectrum) {
        keyed.push_back({{element, suspiciousness(strategy, counts)}, element.format()});
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.ranked.score != b.ranked.score) return a.ranked.score > b.ranked.score;
        return a.key < b.key;
    });

    SuspiciousnessRanking ranking{{}, g, strategy};
    ranking.entries.reserve(keyed.size());
    for (auto& k : keyed) ranking.entries.push_back(std::move(k.ranked));
    return ranking;
}

SuspiciousnessRanking localize(const Profile& profile, const RepairConfig& config) {
    if (config.fl_option == Granularity::Off) {
        throw Error(ErrorKind::Contract, "fault localization is disabled (flOptions=OFF)");
    }
    if (!profile.coverage) {
        throw Error(ErrorKind::Localization, "profile carries no coverage; re-run profiling with coverage");
    }
    if (profile.failing.empty()) {
        throw Error(ErrorKind::Localization, "no failing tests; nothing to localize");
    }
    const auto coverage = coarsen_coverage(*profile.coverage, config.fl_option);
    const auto spectrum = build_spectrum(coverage, profile.failing, profile.tests);
    return rank_spectrum(spectrum, config.fl_option, config.fl_strategy);
}

std::string format_ranking_csv(const SuspiciousnessRanking& ranking) {
    std::string out = "element,score\n";
    char buf[32];
    for (const auto& e : ranking.entries) {
        std::snprintf(buf, sizeof buf, "%.6f", e.score);
        out += io::csv_field(e.element.format());
        out += ',';
        out += buf;
        out += '\n';
    }
    return out;
}

void save_ranking(const SuspiciousnessRanking& ranking, const std::filesystem::path& path) {
    io::write_text(path, format_ranking_csv(ranking));
}

}  // namespace prf

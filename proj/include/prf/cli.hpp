#pragma once

#include "prf/core_model.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace prf {

/// Parses a JSON configuration. `project_root` becomes the adapter's working directory.
/// Absent keys take their defaults; unknown keys are rejected.
RepairConfig parse_config(const std::string& json_text, const std::filesystem::path& project_root);

/// Loads a configuration file; the project root is the directory holding it.
RepairConfig load_config(const std::filesystem::path& path);

/// Accepts FILE/FUNCTION/LINE/OFF and the CLASS_LEVEL/METHOD_LEVEL/LINE_LEVEL aliases.
Granularity parse_granularity(const std::string& text);

enum ExitCode : int { kExitPlausible = 0, kExitNoPlausible = 1, kExitError = 2 };

struct CommandStreams {
    std::ostream& out;
    std::ostream& err;
};

int cmd_run(const RepairConfig& config, CommandStreams io);
int cmd_profile(const RepairConfig& config, CommandStreams io);
int cmd_localize(const RepairConfig& config, CommandStreams io);
int cmd_validate(const RepairConfig& config, CommandStreams io);
int cmd_report(const RepairConfig& config, CommandStreams io);

struct BenchRow {
    std::string strategy;
    std::int64_t median_ms = 0;
    double speedup_vs_vanilla = 0.0;
    std::int64_t tests_executed = 0;
};

/// Times vanilla, reorder, reorder+selection and reorder+selection+parallel validation of
/// the same pool, `repetitions` times each. Validation is exhaustive for every strategy.
std::vector<BenchRow> run_bench(const RepairConfig& config, int repetitions);
std::string format_bench_csv(const std::vector<BenchRow>& rows);

int cmd_bench(const RepairConfig& config, int repetitions, CommandStreams io);

/// Entry point shared by the prf executable: `prf <command> --config <path> [--reps N]`.
int cli_main(int argc, char** argv);

}  // namespace prf

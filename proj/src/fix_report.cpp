#include "prf/fix_report.hpp"

#include "prf/error.hpp"
#include "prf/io.hpp"
#include "prf/process.hpp"

#include <json.hpp>

#include <set>
#include <sstream>

namespace prf {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> parse_prioritized_ids(const std::string& plugin_output,
                                               const std::vector<std::string>& candidates) {
    const std::set<std::string> allowed(candidates.begin(), candidates.end());
    std::set<std::string> seen;
    std::vector<std::string> out;
    std::istringstream in(plugin_output);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!allowed.count(line)) {
            throw Error(ErrorKind::Report,
                        "prioritization plugin named '" + line + "', which is not a plausible patch");
        }
        if (!seen.insert(line).second) {
            throw Error(ErrorKind::Report, "prioritization plugin listed '" + line + "' twice");
        }
        out.push_back(line);
    }
    return out;
}

namespace {

std::vector<std::string> run_prioritization_plugin(const RepairConfig& config,
                                                   const std::vector<const ValidationVerdict*>& plausible,
                                                   const PatchPool& pool) {
    json candidates = json::array();
    std::vector<std::string> ids;
    for (const auto* v : plausible) {
        const auto* patch = pool.find(v->patch_id());
        candidates.push_back({{"patch_id", v->patch_id()},
                              {"patch_root", patch ? fs::absolute(patch->root).string() : ""},
                              {"tests_executed", v->tests_executed()},
                              {"wall_ms", v->wall_ms()}});
        ids.push_back(v->patch_id());
    }
    const fs::path input = fs::absolute(config.work_dir() / "prioritization-candidates.json");
    io::write_text(input, json{{"candidates", candidates}}.dump(2) + "\n");

    process::Spec spec;
    spec.argv = process::split_command(config.patch_prioritization_plugin);
    spec.argv.push_back(input.string());
    spec.cwd = config.project_root;
    spec.stdout_path = config.work_dir() / "prioritization-plugin.out";
    spec.stderr_path = config.work_dir() / "prioritization-plugin.err";
    const auto r = process::run(spec);
    const std::string out = process::read_file(spec.stdout_path);
    if (r.status != process::Status::Exited || r.exit_code != 0) {
        const std::string why = r.status == process::Status::SpawnFailed
                                    ? r.spawn_error
                                    : "exit status " + std::to_string(r.exit_code);
        throw Error(ErrorKind::Report, "patch prioritization plugin '" +
                                           config.patch_prioritization_plugin + "' failed (" + why +
                                           ")\n" + out + process::read_file(spec.stderr_path));
    }
    return parse_prioritized_ids(out, ids);
}

}  // namespace

FixReport generate_report(const ValidationReport& report, const PatchPool& pool,
                          const RepairConfig& config) {
    std::vector<const ValidationVerdict*> plausible;
    for (const auto& patch : pool.patches) {
        const auto it = report.verdicts.find(patch.id);
        if (it != report.verdicts.end() && it->second.kind() == VerdictKind::Plausible) {
            plausible.push_back(&it->second);
        }
    }

    FixReport fix;
    fix.plugin_used = config.patch_prioritization_plugin;
    fix.stopped_early = report.stopped_early;

    std::vector<std::string> order;
    if (plausible.empty()) {
        fix.summary = "no plausible patches among " + std::to_string(report.verdicts.size()) +
                      " validated";
        return fix;
    }
    if (config.patch_prioritization_plugin == kDummyPrioritizationPlugin) {
        for (const auto* v : plausible) order.push_back(v->patch_id());
    } else {
        order = run_prioritization_plugin(config, plausible, pool);
    }

    int rank = 0;
    for (const auto& id : order) {
        const auto& v = report.verdicts.at(id);
        fix.entries.push_back({id, ++rank, to_string(v.kind()), v.tests_executed(), v.wall_ms()});
    }
    fix.summary = std::to_string(fix.entries.size()) + " plausible patch(es) reported out of " +
                  std::to_string(report.verdicts.size()) + " validated";
    if (fix.entries.size() < plausible.size()) {
        fix.summary += "; plugin dropped " + std::to_string(plausible.size() - fix.entries.size());
    }
    return fix;
}

std::string format_report_text(const FixReport& report) {
    std::ostringstream out;
    out << "Fix report (" << report.plugin_used << ")\n";
    out << report.summary << (report.stopped_early ? " (stopped early)" : "") << "\n";
    for (const auto& e : report.entries) {
        out << "  " << e.rank << ". " << e.patch_id << "  tests=" << e.tests_executed
            << "  wall=" << e.wall_ms << "ms\n";
    }
    return out.str();
}

std::string serialize_fix_report(const FixReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"rank", e.rank},
                           {"patch_id", e.patch_id},
                           {"verdict", e.verdict},
                           {"tests_executed", e.tests_executed},
                           {"wall_ms", e.wall_ms}});
    }
    const json doc = {{"plugin", report.plugin_used},
                      {"summary", report.summary},
                      {"stopped_early", report.stopped_early},
                      {"entries", entries}};
    return doc.dump(2) + "\n";
}

void save_fix_report(const FixReport& report, const fs::path& work_dir) {
    io::write_text(work_dir / "fix-report.json", serialize_fix_report(report));
}

}  // namespace prf

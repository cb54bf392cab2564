#pragma once

// Experiment manifests, the figure/table recipes, on-disk result layout and
// the headline checks shared by `report` and the acceptance binary.

#include "jamslice/metrics.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace jamslice {

struct ScenarioSpec {
    std::string name;
    nlohmann::json overrides = nlohmann::json::object();  // applied over the manifest base
};

struct ExperimentManifest {
    std::string name = "experiment";
    nlohmann::json base = nlohmann::json::object();
    std::vector<std::uint64_t> seeds;
    std::string output;  // empty means results/<name>
    std::vector<ScenarioSpec> scenarios;
    std::vector<std::string> recipes;
};

/// Strict parse. `seeds` is either a list or {"first": s, "count": n}.
ExperimentManifest manifest_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentManifest& m);
ExperimentManifest load_manifest(const std::filesystem::path& path);

/// Explicit scenarios plus those of every referenced recipe, deduplicated by
/// name. The same name with different overrides is a ConfigError.
std::vector<ScenarioSpec> expand_scenarios(const ExperimentManifest& m);

/// Resolved configs, one per (scenario, seed), with the seed offset applied.
std::vector<ScenarioConfig> scenario_configs(const ExperimentManifest& m, const ScenarioSpec& s,
                                             std::uint64_t seed_offset = 0);

/// Every problem in the manifest, including each scenario's resolved config.
std::vector<std::string> validate_manifest(const ExperimentManifest& m);

/// What aggregation needs from one run once the full record is on disk.
struct RunDigest {
    std::uint64_t seed = 0;
    std::string config_hash;
    KpiSummary expert;
    KpiSummary learner;
    std::vector<double> expert_reward, learner_reward;
    std::vector<double> expert_latency_ms, learner_latency_ms;  // second half of each phase
};

RunDigest digest(const RunRecord& r);

struct ScenarioResult {
    std::string name;
    nlohmann::json config;  // seed 0 view of the resolved config
    std::vector<RunDigest> runs;

    ScenarioRuns kpis(Phase p) const;
};

using ResultSet = std::map<std::string, ScenarioResult>;

struct Recipe {
    std::string name;
    std::string description;
    std::vector<ScenarioSpec> scenarios;
    std::function<void(const ResultSet&, const std::filesystem::path&)> emit;
};

const std::vector<Recipe>& recipes();
const Recipe* find_recipe(const std::string& name);

/// Canonical scenario name, e.g. "drl-ja+decoy-drl" or "ues10.cja".
std::string scenario_name(AttackKind a, MitigationKind m, const std::string& suffix = "");
nlohmann::json scenario_overrides(AttackKind a, MitigationKind m);

struct RunOptions {
    std::filesystem::path out;
    int parallel = 1;
    std::uint64_t seed_offset = 0;
    std::function<void(const std::string&)> log;
};

struct RunOutcome {
    int completed = 0;
    std::vector<std::string> failures;
};

/// Runs every scenario, writes records, KPI files, recipe outputs and the report.
RunOutcome run_experiment(const ExperimentManifest& m, const RunOptions& opt);

/// Reads kpi/*.json back, checking each against its run summaries' hashes.
ResultSet load_results(const std::filesystem::path& dir);

struct Check {
    std::string name;
    bool pass = false;
    bool evaluated = false;  // false when the scenarios it needs are missing
    std::string detail;
};

/// Degradation, recovery and ordering checks over learner-phase KPIs; the
/// scenarios are found by attack and mitigation among comparable configs.
std::vector<Check> headline_checks(const ResultSet& results);

/// Markdown summary: per-scenario KPIs, degradation and recovery, checks.
std::string report_text(const ResultSet& results);

/// Output root: explicit flag, then $JAMSLICE_OUT/<name>, then the manifest.
std::filesystem::path output_dir(const ExperimentManifest& m, const std::optional<std::string>& flag);

} // namespace jamslice

#pragma once

// KPI aggregation over run records: eCDF, degradation and recovery
// percentages, convergence detection and the attacker/mitigation matrices.

#include "jamslice/engine.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jamslice {

struct EcdfPoint {
    double x = 0.0;
    double f = 0.0;
};

/// Right-continuous empirical CDF; one point per distinct sample value.
class Ecdf {
public:
    explicit Ecdf(std::vector<double> samples);

    /// Fraction of samples <= x.
    double operator()(double x) const;
    const std::vector<EcdfPoint>& points() const { return points_; }
    std::size_t size() const { return sorted_.size(); }
    /// Smallest sample x with F(x) >= q, q in (0, 1].
    double quantile(double q) const;

private:
    std::vector<double> sorted_;
    std::vector<EcdfPoint> points_;
};

enum class KpiKind : std::uint8_t { Throughput, Latency };

const char* to_string(KpiKind k);

/// Throughput: (baseline - current) / baseline * 100; latency: (current - baseline) / baseline * 100.
double degradation(double current, double baseline, KpiKind kind);

/// Throughput: (mitigated - attacked) / attacked * 100; latency: (attacked - mitigated) / attacked * 100.
double recovery(double mitigated, double attacked, KpiKind kind);

struct ConvergenceRule {
    int window = 100;       // EMA span and slope lag
    double tolerance = 1e-3;  // on |slope| per TTI
    int hold = 200;         // consecutive TTIs the slope must stay under tolerance
};

/// Exponential moving average with alpha = 2 / (window + 1), seeded by the first value.
std::vector<double> ema(std::span<const double> series, int window);

/// First TTI (index into the series) that starts a run of `hold` TTIs with
/// |ema[t] - ema[t - window]| / window < tolerance; nullopt when none.
std::optional<std::int64_t> convergence_point(std::span<const double> series, const ConvergenceRule& rule = {});

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for n < 2
    int n = 0;
};

MeanStd mean_std(std::span<const double> xs);

struct KpiSummary {
    std::string name;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string attack;
    std::string mitigation;
    double throughput_mbps = 0.0;  // mean eMBB goodput
    double latency_ms = 0.0;       // mean over delivered uRLLC packets
    double latency_p50_ms = 0.0;
    double latency_p95_ms = 0.0;
    double latency_p99_ms = 0.0;
    std::int64_t latency_samples = 0;
    double drop_rate = 0.0;  // uRLLC drops over arrivals in the measured phase
    std::optional<std::int64_t> expert_convergence;
    std::optional<std::int64_t> learner_convergence;
    double jam_hit_rate = 0.0;  // jammed RBs that carried data, over all jammed RBs
    double mean_reward = 0.0;
};

/// KPIs over the second half of `phase`; convergence of both phases' reward series.
KpiSummary summarize(const RunRecord& r, Phase phase = Phase::Learner, const ConvergenceRule& rule = {});

nlohmann::json to_json(const KpiSummary& k);
KpiSummary kpi_from_json(const nlohmann::json& j);

/// Throws ConfigError unless the two configs differ only in name, seed and
/// the attack and mitigation kinds. An attack or mitigation section is ignored
/// entirely when its kind is none on either side.
void require_comparable(const nlohmann::json& a, const nlohmann::json& b);

/// Per-seed KPI summaries of one (attack, mitigation) scenario, with the config it ran.
struct ScenarioRuns {
    nlohmann::json config;
    std::vector<KpiSummary> runs;
};

/// Keyed by "<attack>/<mitigation>", for example "drl-ja/decoy-drl".
using RunGroups = std::map<std::string, ScenarioRuns>;

std::string group_key(AttackKind a, MitigationKind m);

/// Seed-paired percentage of `current` against `reference`; missing seeds are skipped.
std::optional<MeanStd> paired_degradation(const ScenarioRuns& current, const ScenarioRuns& reference, KpiKind kind);
std::optional<MeanStd> paired_recovery(const ScenarioRuns& mitigated, const ScenarioRuns& attacked, KpiKind kind);

struct ComparisonTable {
    std::string title;
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    std::vector<std::vector<std::optional<MeanStd>>> cells;  // absent cells stay empty

    nlohmann::json to_json() const;
    std::string to_text() const;
};

enum class TableKind : std::uint8_t { AttackerDegradation, MitigationThroughput, MitigationLatency };

/// Attacker degradation (rows FNN and DRL-JA, columns throughput and latency)
/// or mitigation recovery (rows attackers, columns FNN and DRL decoys).
ComparisonTable comparison_table(const RunGroups& groups, TableKind kind);

} // namespace jamslice

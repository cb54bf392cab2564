#pragma once

// Deterministic TTI-stepped simulation of one target gNB and its neighbors:
// slicing agent, optional jammer, optional defense, expert then learner phase.

#include "jamslice/attacks.hpp"
#include "jamslice/dtrl.hpp"
#include "jamslice/mitigation.hpp"
#include "jamslice/netmodel.hpp"
#include "jamslice/traffic.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace jamslice {

struct ServiceParams {
    double decode_threshold_db = 0.0;
    int harq_rtt_ttis = 4;
    int max_retransmissions = 1;
    double cycles_per_bit = 200.0;
    double cloud_delay_ms = 8.0;
};

struct MitigationParams {
    MitigationKind kind = MitigationKind::None;
    DefenderParams defender;
    double guard_band = 0.05;
    int repo_runs = 10;
    std::uint64_t repo_seed = 9001;
};

struct ScenarioConfig {
    std::string name = "default";
    std::uint64_t seed = 1;
    int expert_ttis = 3000;
    int learner_ttis = 3000;
    double tti_us = 142.9;
    QueueState initial_queue;
    TopologyParams topology;
    double neighbor_activity = 0.5;
    RbGrid grid;
    LinkBudget link;
    double noise_figure_db = 5.0;
    TrafficParams traffic;
    int queue_cap = 100;
    ServiceParams service;
    ObjectiveWeights weights;
    AgentConfig agent;
    AttackKind attack = AttackKind::None;
    JammerParams jammer;
    MitigationParams mitigation;

    double tti_s() const { return tti_us * 1e-6; }
};

nlohmann::json to_json(const ScenarioConfig& c);
/// Strict parse: unknown keys, wrong types and out-of-range values are all
/// collected and raised together as a ConfigError with field paths.
ScenarioConfig config_from_json(const nlohmann::json& j);
/// Applies `overrides` on top of `base` (deep merge of objects) and parses.
ScenarioConfig config_with_overrides(const ScenarioConfig& base, const nlohmann::json& overrides);
std::vector<std::string> validate(const ScenarioConfig& c);
/// 16 hex digits of FNV-1a over the canonical JSON of the config.
std::string config_hash(const ScenarioConfig& c);

enum class Phase : std::uint8_t { Expert = 0, Learner = 1 };

struct TtiRecord {
    std::int64_t tti = 0;  // global index across both phases
    Phase phase = Phase::Expert;
    int action = 0;
    double reward = 0.0;
    double embb_rate_mbps = 0.0;     // Shannon rate over the eMBB RBs, jamming included
    double embb_goodput_mbps = 0.0;  // bits of eMBB packets completed this TTI
    double embb_tx_mbps = 0.0;       // eMBB bits carried on successful transmissions
    std::vector<double> urllc_latency_ms;
    int embb_queue = 0;
    int urllc_queue = 0;
    std::vector<int> allocated;  // RBs of the target gNB carrying data
    std::vector<int> jammed;
    double jam_power_mw = 0.0;
    std::int64_t energy_units = 0;
    std::int64_t budget_remaining = -1;  // -1 without an energy-limited jammer
    std::vector<int> decoys;
    double decoy_power_mw = 0.0;
    int jam_hits = 0;      // jammed RBs that carried data
    int jam_on_decoy = 0;  // jammed RBs that carried a decoy
    double mean_sinr = 0.0;     // linear, over allocated RBs
    double mean_sinr_db = 0.0;  // mean of per-RB dB values, what the jammer observes
    double mean_rx_power_mw = 0.0;
    bool suspended = false;
    int failed_transmissions = 0;
};

/// Per-phase packet bookkeeping; arrived == delivered + dropped_harq +
/// dropped_overflow + queued always holds.
struct PacketLedger {
    std::int64_t arrived = 0;
    std::int64_t delivered = 0;
    std::int64_t dropped_harq = 0;
    std::int64_t dropped_overflow = 0;
    std::int64_t queued = 0;

    bool balanced() const { return arrived == delivered + dropped_harq + dropped_overflow + queued; }
};

struct RunRecord {
    std::string name;
    std::uint64_t seed = 0;
    std::string config_hash;
    nlohmann::json config;
    std::int64_t expert_ttis = 0;
    std::int64_t learner_ttis = 0;
    std::vector<TtiRecord> ttis;
    PacketLedger expert_embb, expert_urllc, learner_embb, learner_urllc;
    std::int64_t jammer_budget_initial = 0;

    std::span<const TtiRecord> phase(Phase p) const;
};

nlohmann::json to_json(const TtiRecord& t);
TtiRecord tti_from_json(const nlohmann::json& j);
/// Summary document without the per-TTI series.
nlohmann::json summary_json(const RunRecord& r);
void write_record(const RunRecord& r, const std::string& summary_path, const std::string& ttis_path);
RunRecord read_record(const std::string& summary_path, const std::string& ttis_path);

/// Everything a run owns: radio world, queues, agents, jammer, defender.
class World {
public:
    World(const ScenarioConfig& cfg, const KnowledgeRepository* repo);

    /// Resets queues, traffic, rewards and the jammer budget. Entering the
    /// learner phase snapshots the expert and builds the learner with transfer.
    void begin_phase(Phase p);
    /// Closes the current phase's packet ledgers.
    std::pair<PacketLedger, PacketLedger> end_phase();

    const ScenarioConfig& config() const { return cfg_; }
    const Topology& topology() const { return topo_; }
    const ChannelState& channel() const { return ch_; }
    Phase phase() const { return phase_; }
    std::int64_t tti() const { return tti_; }
    const SlicingAgent& agent() const { return *agent_; }
    const Jammer* jammer() const { return jammer_.get(); }
    /// Expert Q snapshot handed to the learner (null before the learner phase).
    std::shared_ptr<const QTable> expert_snapshot() const { return expert_snapshot_; }
    double jammer_gain_to_ue(int ue) const { return jam_to_ue_[ue]; }
    double gnb_gain_to_jammer(int gnb) const { return gnb_to_jam_[gnb]; }
    double detection_threshold() const { return e_theta_dbm_; }
    double jammer_noise_mw() const { return jam_noise_mw_; }
    const SensingParams& sensing_params() const { return sensing_; }

private:
    friend TtiRecord run_tti(World& world);

    struct Assignment {
        std::uint64_t packet = 0;
        Slice slice = Slice::Embb;
        std::vector<int> rbs;
    };

    void admit(Slice s, int count);
    std::vector<Assignment> schedule(const SliceAction& a, std::vector<int>& owner);
    SliceQueue& queue(Slice s) { return s == Slice::Embb ? embb_q_ : urllc_q_; }
    PacketLedger& ledger(Slice s) { return s == Slice::Embb ? embb_ledger_ : urllc_ledger_; }
    double processing_ms(Slice s, int bits) const;

    ScenarioConfig cfg_;
    const KnowledgeRepository* repo_;
    SeedTree seeds_;
    Topology topo_;
    ChannelState ch_;
    Allocation alloc_;
    std::vector<std::vector<int>> cell_ues_;  // per gNB, all slices
    std::vector<int> embb_ues_, urllc_ues_;   // target gNB
    std::vector<double> est_bits_per_rb_;     // per UE, from mean interference
    std::vector<double> jam_to_ue_;
    std::vector<double> gnb_to_jam_;
    double jam_noise_mw_ = 0.0;
    double e_theta_dbm_ = 0.0;
    SensingParams sensing_;
    double decode_threshold_ = 1.0;

    Phase phase_ = Phase::Expert;
    std::int64_t tti_ = 0;
    std::optional<TrafficGenerator> traffic_;
    SliceQueue embb_q_{Slice::Embb, 100};
    SliceQueue urllc_q_{Slice::Urllc, 100};
    std::uint64_t next_packet_ = 0;
    PacketLedger embb_ledger_, urllc_ledger_;

    Rng traffic_rng_, sched_rng_, neighbor_rng_, agent_rng_, jam_rng_, def_rng_;
    std::unique_ptr<SlicingAgent> expert_;
    std::unique_ptr<SlicingAgent> learner_;
    SlicingAgent* agent_ = nullptr;
    std::shared_ptr<const QTable> expert_snapshot_;
    std::optional<double> agent_reward_;

    std::unique_ptr<Jammer> jammer_;
    std::optional<DecoyDefender> decoy_;
    std::optional<FnnDefender> fnn_defender_;
    std::optional<double> defender_reward_;
    Bits last_jammed_;
    bool suspend_next_ = false;
};

/// One TTI with the fixed phase order arrivals -> allocation -> decoys ->
/// sensing and jamming -> realization -> rewards -> record.
TtiRecord run_tti(World& world);

/// Expert phase, snapshot, learner phase with transfer.
RunRecord run_scenario(const ScenarioConfig& cfg, const KnowledgeRepository* repo = nullptr);

/// Averages used by the suspend-learning reference, from a completed run.
MonitorSample monitor_sample(const RunRecord& r);

/// Reference built from `repo_runs` no-attack variants of `cfg`.
KnowledgeRepository build_repo_for(const ScenarioConfig& cfg, int parallel);

struct BatchItem {
    bool ok = false;
    std::string error;
    RunRecord record;
};

/// Independent runs; result i always belongs to config i, whatever the
/// parallelism. Failures are reported per item.
std::vector<BatchItem> run_batch(const std::vector<ScenarioConfig>& configs, int parallel);

/// `base` replicated over seeds base.seed + offset + i.
std::vector<ScenarioConfig> seed_sweep(const ScenarioConfig& base, int count, std::uint64_t offset = 0);

} // namespace jamslice

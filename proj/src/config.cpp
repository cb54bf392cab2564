#include "jamslice/engine.hpp"

#include "jamslice/errors.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace jamslice {

using nlohmann::json;

namespace {

const char* mode_name(QMode m) { return m == QMode::Table ? "table" : "lstm"; }

// Reads one JSON object into typed fields, recording every problem with its path.
class Reader {
public:
    Reader(const json& j, std::string path, std::vector<std::string>& issues)
        : j_(j), path_(std::move(path)), issues_(issues) {
        if (!j_.is_object()) issues_.push_back(where("") + ": expected an object");
    }

    ~Reader() {
        if (!j_.is_object()) return;
        for (const auto& [k, v] : j_.items())
            if (!known_.count(k)) issues_.push_back(where(k) + ": unknown key");
    }

    template <class T>
    void get(const char* key, T& out) {
        known_.insert(key);
        if (!j_.is_object() || !j_.contains(key)) return;
        const json& v = j_.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) return bad(key, "expected a boolean");
            out = v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) return bad(key, "expected a string");
            out = v.get<std::string>();
        } else if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::int64_t> ||
                             std::is_same_v<T, int>) {
            if (!v.is_number_integer()) return bad(key, "expected an integer");
            if constexpr (std::is_same_v<T, std::uint64_t>) {
                if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) out = v.get<std::uint64_t>();
                else bad(key, "expected a non-negative integer");
            } else {
                out = v.get<T>();
            }
        } else {
            if (!v.is_number()) return bad(key, "expected a number");
            out = v.get<double>();
        }
    }

    Reader section(const char* key) {
        known_.insert(key);
        static const json empty = json::object();
        if (!j_.is_object() || !j_.contains(key)) return Reader(empty, where(key), issues_);
        return Reader(j_.at(key), where(key), issues_);
    }

    std::string where(const std::string& key) const {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    void bad(const char* key, const char* what) { issues_.push_back(where(key) + ": " + what); }

    const json& j_;
    std::string path_;
    std::vector<std::string>& issues_;
    std::set<std::string> known_;
};

void merge(json& base, const json& over) {
    if (!base.is_object() || !over.is_object()) {
        base = over;
        return;
    }
    for (const auto& [k, v] : over.items()) {
        if (base.contains(k) && base[k].is_object() && v.is_object()) merge(base[k], v);
        else base[k] = v;
    }
}

void need(bool ok, std::vector<std::string>& out, const std::string& msg) {
    if (!ok) out.push_back(msg);
}

} // namespace

json to_json(const ScenarioConfig& c) {
    const auto& t = c.topology;
    const auto& l = c.agent.lstm;
    const auto& jp = c.jammer;
    const auto& d = c.mitigation.defender;
    return json{
        {"name", c.name},
        {"seed", c.seed},
        {"run",
         {{"expert_ttis", c.expert_ttis},
          {"learner_ttis", c.learner_ttis},
          {"tti_us", c.tti_us},
          {"initial_queue", {{"embb", c.initial_queue.embb}, {"urllc", c.initial_queue.urllc}}}}},
        {"topology",
         {{"gnbs", t.gnbs},
          {"inter_site_m", t.inter_site_m},
          {"cell_radius_m", t.cell_radius_m},
          {"min_ue_distance_m", t.min_ue_distance_m},
          {"max_tx_power_dbm", t.max_tx_power_dbm},
          {"compute_hz", t.compute_hz},
          {"embb_ues", t.embb_ues},
          {"urllc_ues", t.urllc_ues},
          {"neighbor_activity", c.neighbor_activity}}},
        {"grid",
         {{"subcarriers", c.grid.subcarriers},
          {"rbgs", c.grid.rbgs},
          {"bandwidth_mhz", c.grid.bandwidth_mhz},
          {"subcarrier_spacing_khz", c.grid.subcarrier_spacing_khz}}},
        {"channel",
         {{"noise_figure_db", c.noise_figure_db},
          {"penetration_loss_db", c.link.penetration_loss_db},
          {"antenna_gain_db", c.link.antenna_gain_db},
          {"shadowing_sigma_db", c.link.shadowing_sigma_db}}},
        {"traffic",
         {{"embb_load_mbps", c.traffic.embb_load_mbps},
          {"urllc_load_mbps", c.traffic.urllc_load_mbps},
          {"embb_packet_bytes", c.traffic.embb_packet_bytes},
          {"urllc_packet_bytes", c.traffic.urllc_packet_bytes},
          {"urllc_cbr_fraction", c.traffic.urllc_cbr_fraction},
          {"queue_cap", c.queue_cap}}},
        {"service",
         {{"decode_threshold_db", c.service.decode_threshold_db},
          {"harq_rtt_ttis", c.service.harq_rtt_ttis},
          {"max_retransmissions", c.service.max_retransmissions},
          {"cycles_per_bit", c.service.cycles_per_bit},
          {"cloud_delay_ms", c.service.cloud_delay_ms}}},
        {"objective",
         {{"w_embb", c.weights.embb}, {"w_urllc", c.weights.urllc}, {"target_delay_ms", c.weights.target_delay_ms}}},
        {"agent",
         {{"mode", mode_name(c.agent.mode)},
          {"alpha", c.agent.q.alpha},
          {"gamma", c.agent.q.gamma},
          {"epsilon", c.agent.q.epsilon},
          {"lstm",
           {{"hidden", l.hidden},
            {"layers", l.layers},
            {"sequence", l.sequence},
            {"replay", l.replay},
            {"minibatch", l.minibatch},
            {"train_interval", l.train_interval},
            {"train_iterations", l.train_iterations},
            {"copy_interval", l.copy_interval},
            {"learning_rate", l.learning_rate},
            {"grad_clip", l.grad_clip},
            {"init_range", l.init_range}}}}},
        {"attack",
         {{"kind", to_string(c.attack)},
          {"power_dbm", jp.power_dbm},
          {"max_power_dbm", jp.max_power_dbm},
          {"subband_rbs", jp.subband_rbs},
          {"monitor_ttis", jp.monitor_ttis},
          {"max_rbs", jp.max_rbs},
          {"budget_units", jp.budget_units},
          {"x_r_dbm", jp.x_r_dbm},
          {"distance_m", jp.distance_m},
          {"omega1", jp.omega1},
          {"omega2", jp.omega2},
          {"gamma", jp.gamma},
          {"epsilon", jp.epsilon},
          {"hidden", jp.hidden},
          {"layers", jp.layers},
          {"sequence", jp.sequence},
          {"replay", jp.replay},
          {"minibatch", jp.minibatch},
          {"train_interval", jp.train_interval},
          {"copy_interval", jp.copy_interval},
          {"learning_rate", jp.learning_rate},
          {"grad_clip", jp.grad_clip},
          {"init_range", jp.init_range},
          {"fnn_history", jp.fnn_history},
          {"fnn_hidden", jp.fnn_hidden},
          {"fnn_learning_rate", jp.fnn_learning_rate},
          {"fnn_init_range", jp.fnn_init_range}}},
        {"mitigation",
         {{"kind", to_string(c.mitigation.kind)},
          {"chi", d.chi},
          {"gamma", d.gamma},
          {"epsilon", d.epsilon},
          {"signal_samples", d.signal_samples},
          {"fnn_history", d.fnn_history},
          {"fnn_hidden", d.fnn_hidden},
          {"fnn_learning_rate", d.fnn_learning_rate},
          {"fnn_init_range", d.fnn_init_range},
          {"guard_band", c.mitigation.guard_band},
          {"repo_runs", c.mitigation.repo_runs},
          {"repo_seed", c.mitigation.repo_seed}}},
    };
}

ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig c;
    std::vector<std::string> issues;
    {
        Reader root(j, "", issues);
        root.get("name", c.name);
        root.get("seed", c.seed);
        {
            Reader r = root.section("run");
            r.get("expert_ttis", c.expert_ttis);
            r.get("learner_ttis", c.learner_ttis);
            r.get("tti_us", c.tti_us);
            Reader q = r.section("initial_queue");
            q.get("embb", c.initial_queue.embb);
            q.get("urllc", c.initial_queue.urllc);
        }
        {
            Reader r = root.section("topology");
            auto& t = c.topology;
            r.get("gnbs", t.gnbs);
            r.get("inter_site_m", t.inter_site_m);
            r.get("cell_radius_m", t.cell_radius_m);
            r.get("min_ue_distance_m", t.min_ue_distance_m);
            r.get("max_tx_power_dbm", t.max_tx_power_dbm);
            r.get("compute_hz", t.compute_hz);
            r.get("embb_ues", t.embb_ues);
            r.get("urllc_ues", t.urllc_ues);
            r.get("neighbor_activity", c.neighbor_activity);
        }
        {
            Reader r = root.section("grid");
            r.get("subcarriers", c.grid.subcarriers);
            r.get("rbgs", c.grid.rbgs);
            r.get("bandwidth_mhz", c.grid.bandwidth_mhz);
            r.get("subcarrier_spacing_khz", c.grid.subcarrier_spacing_khz);
        }
        {
            Reader r = root.section("channel");
            r.get("noise_figure_db", c.noise_figure_db);
            r.get("penetration_loss_db", c.link.penetration_loss_db);
            r.get("antenna_gain_db", c.link.antenna_gain_db);
            r.get("shadowing_sigma_db", c.link.shadowing_sigma_db);
        }
        {
            Reader r = root.section("traffic");
            r.get("embb_load_mbps", c.traffic.embb_load_mbps);
            r.get("urllc_load_mbps", c.traffic.urllc_load_mbps);
            r.get("embb_packet_bytes", c.traffic.embb_packet_bytes);
            r.get("urllc_packet_bytes", c.traffic.urllc_packet_bytes);
            r.get("urllc_cbr_fraction", c.traffic.urllc_cbr_fraction);
            r.get("queue_cap", c.queue_cap);
        }
        {
            Reader r = root.section("service");
            r.get("decode_threshold_db", c.service.decode_threshold_db);
            r.get("harq_rtt_ttis", c.service.harq_rtt_ttis);
            r.get("max_retransmissions", c.service.max_retransmissions);
            r.get("cycles_per_bit", c.service.cycles_per_bit);
            r.get("cloud_delay_ms", c.service.cloud_delay_ms);
        }
        {
            Reader r = root.section("objective");
            r.get("w_embb", c.weights.embb);
            r.get("w_urllc", c.weights.urllc);
            r.get("target_delay_ms", c.weights.target_delay_ms);
        }
        {
            Reader r = root.section("agent");
            std::string mode = mode_name(c.agent.mode);
            r.get("mode", mode);
            if (mode == "table") c.agent.mode = QMode::Table;
            else if (mode == "lstm") c.agent.mode = QMode::Lstm;
            else issues.push_back("agent.mode: unknown value '" + mode + "' (allowed: table, lstm)");
            r.get("alpha", c.agent.q.alpha);
            r.get("gamma", c.agent.q.gamma);
            r.get("epsilon", c.agent.q.epsilon);
            Reader l = r.section("lstm");
            auto& p = c.agent.lstm;
            l.get("hidden", p.hidden);
            l.get("layers", p.layers);
            l.get("sequence", p.sequence);
            l.get("replay", p.replay);
            l.get("minibatch", p.minibatch);
            l.get("train_interval", p.train_interval);
            l.get("train_iterations", p.train_iterations);
            l.get("copy_interval", p.copy_interval);
            l.get("learning_rate", p.learning_rate);
            l.get("grad_clip", p.grad_clip);
            l.get("init_range", p.init_range);
        }
        {
            Reader r = root.section("attack");
            std::string kind = to_string(c.attack);
            r.get("kind", kind);
            if (auto k = parse_attack(kind)) c.attack = *k;
            else issues.push_back("attack.kind: unknown value '" + kind + "' (allowed: none, cja, rja, drl-ja, fnn)");
            auto& p = c.jammer;
            r.get("power_dbm", p.power_dbm);
            r.get("max_power_dbm", p.max_power_dbm);
            r.get("subband_rbs", p.subband_rbs);
            r.get("monitor_ttis", p.monitor_ttis);
            r.get("max_rbs", p.max_rbs);
            r.get("budget_units", p.budget_units);
            r.get("x_r_dbm", p.x_r_dbm);
            r.get("distance_m", p.distance_m);
            r.get("omega1", p.omega1);
            r.get("omega2", p.omega2);
            r.get("gamma", p.gamma);
            r.get("epsilon", p.epsilon);
            r.get("hidden", p.hidden);
            r.get("layers", p.layers);
            r.get("sequence", p.sequence);
            r.get("replay", p.replay);
            r.get("minibatch", p.minibatch);
            r.get("train_interval", p.train_interval);
            r.get("copy_interval", p.copy_interval);
            r.get("learning_rate", p.learning_rate);
            r.get("grad_clip", p.grad_clip);
            r.get("init_range", p.init_range);
            r.get("fnn_history", p.fnn_history);
            r.get("fnn_hidden", p.fnn_hidden);
            r.get("fnn_learning_rate", p.fnn_learning_rate);
            r.get("fnn_init_range", p.fnn_init_range);
        }
        {
            Reader r = root.section("mitigation");
            std::string kind = to_string(c.mitigation.kind);
            r.get("kind", kind);
            if (auto k = parse_mitigation(kind)) c.mitigation.kind = *k;
            else
                issues.push_back("mitigation.kind: unknown value '" + kind +
                                 "' (allowed: none, suspend, decoy-drl, decoy-fnn)");
            auto& d = c.mitigation.defender;
            r.get("chi", d.chi);
            r.get("gamma", d.gamma);
            r.get("epsilon", d.epsilon);
            r.get("signal_samples", d.signal_samples);
            r.get("fnn_history", d.fnn_history);
            r.get("fnn_hidden", d.fnn_hidden);
            r.get("fnn_learning_rate", d.fnn_learning_rate);
            r.get("fnn_init_range", d.fnn_init_range);
            r.get("guard_band", c.mitigation.guard_band);
            r.get("repo_runs", c.mitigation.repo_runs);
            r.get("repo_seed", c.mitigation.repo_seed);
        }
    }
    if (issues.empty()) issues = validate(c);
    if (!issues.empty()) throw ConfigError(issues);
    return c;
}

ScenarioConfig config_with_overrides(const ScenarioConfig& base, const json& overrides) {
    json j = to_json(base);
    merge(j, overrides);
    return config_from_json(j);
}

std::vector<std::string> validate(const ScenarioConfig& c) {
    std::vector<std::string> v;
    need(c.expert_ttis >= 0, v, "run.expert_ttis: must be >= 0");
    need(c.learner_ttis > 0, v, "run.learner_ttis: must be > 0");
    need(c.tti_us > 0.0, v, "run.tti_us: must be > 0");
    need(c.initial_queue.embb >= 0 && c.initial_queue.embb <= c.queue_cap, v,
         "run.initial_queue.embb: must lie in [0, traffic.queue_cap]");
    need(c.initial_queue.urllc >= 0 && c.initial_queue.urllc <= c.queue_cap, v,
         "run.initial_queue.urllc: must lie in [0, traffic.queue_cap]");

    const auto& t = c.topology;
    need(t.gnbs >= 1 && t.gnbs <= 19, v, "topology.gnbs: must lie in [1, 19]");
    need(t.inter_site_m > 0.0, v, "topology.inter_site_m: must be > 0");
    need(t.min_ue_distance_m > 0.0, v, "topology.min_ue_distance_m: must be > 0");
    need(t.cell_radius_m > t.min_ue_distance_m, v, "topology.cell_radius_m: must exceed min_ue_distance_m");
    need(t.compute_hz > 0.0, v, "topology.compute_hz: must be > 0");
    need(t.embb_ues >= 1, v, "topology.embb_ues: must be >= 1");
    need(t.urllc_ues >= 1, v, "topology.urllc_ues: must be >= 1");
    need(std::isfinite(t.max_tx_power_dbm), v, "topology.max_tx_power_dbm: must be finite");
    need(c.neighbor_activity >= 0.0 && c.neighbor_activity <= 1.0, v, "topology.neighbor_activity: must lie in [0, 1]");

    for (const auto& s : c.grid.violations()) v.push_back(s);
    need(c.grid.rbgs <= 32, v, "grid.rbgs: at most 32 RB groups are supported");
    need(c.grid.rbgs >= 2, v, "grid.rbgs: at least 2 RB groups are needed to split two slices");

    need(c.traffic.embb_load_mbps >= 0.0, v, "traffic.embb_load_mbps: must be >= 0");
    need(c.traffic.urllc_load_mbps >= 0.0, v, "traffic.urllc_load_mbps: must be >= 0");
    need(c.traffic.embb_packet_bytes > 0, v, "traffic.embb_packet_bytes: must be > 0");
    need(c.traffic.urllc_packet_bytes > 0, v, "traffic.urllc_packet_bytes: must be > 0");
    need(c.traffic.urllc_cbr_fraction >= 0.0 && c.traffic.urllc_cbr_fraction <= 1.0, v,
         "traffic.urllc_cbr_fraction: must lie in [0, 1]");
    need(c.queue_cap >= 1 && c.queue_cap <= 1000, v, "traffic.queue_cap: must lie in [1, 1000]");

    need(c.service.harq_rtt_ttis >= 1, v, "service.harq_rtt_ttis: must be >= 1");
    need(c.service.max_retransmissions >= 0, v, "service.max_retransmissions: must be >= 0");
    need(c.service.cycles_per_bit > 0.0, v, "service.cycles_per_bit: must be > 0");
    need(c.service.cloud_delay_ms >= 0.0, v, "service.cloud_delay_ms: must be >= 0");

    need(c.weights.embb >= 0.0, v, "objective.w_embb: must be >= 0");
    need(c.weights.urllc >= 0.0, v, "objective.w_urllc: must be >= 0");

    const auto& q = c.agent.q;
    need(q.alpha >= 0.0 && q.alpha <= 1.0, v, "agent.alpha: must lie in [0, 1]");
    need(q.gamma >= 0.0 && q.gamma < 1.0, v, "agent.gamma: must lie in [0, 1)");
    need(q.epsilon >= 0.0 && q.epsilon <= 1.0, v, "agent.epsilon: must lie in [0, 1]");
    const auto& l = c.agent.lstm;
    need(l.hidden >= 1, v, "agent.lstm.hidden: must be >= 1");
    need(l.layers >= 1, v, "agent.lstm.layers: must be >= 1");
    need(l.sequence >= 1, v, "agent.lstm.sequence: must be >= 1");
    need(l.replay >= 1, v, "agent.lstm.replay: must be >= 1");
    need(l.minibatch >= 1 && l.minibatch <= l.replay, v, "agent.lstm.minibatch: must lie in [1, replay]");
    need(l.train_interval >= 0, v, "agent.lstm.train_interval: must be >= 0");
    need(l.train_iterations >= 0, v, "agent.lstm.train_iterations: must be >= 0");
    need(l.copy_interval >= 0, v, "agent.lstm.copy_interval: must be >= 0");
    need(l.learning_rate >= 0.0, v, "agent.lstm.learning_rate: must be >= 0");

    const auto& j = c.jammer;
    need(j.subband_rbs >= 1 && j.subband_rbs <= c.grid.rbgs, v, "attack.subband_rbs: must lie in [1, grid.rbgs]");
    need(j.max_rbs >= 1 && j.max_rbs <= c.grid.rbgs, v, "attack.max_rbs: must lie in [1, grid.rbgs]");
    need(j.monitor_ttis >= 1, v, "attack.monitor_ttis: must be >= 1");
    need(j.budget_units >= 0, v, "attack.budget_units: must be >= 0");
    need(j.distance_m > 0.0, v, "attack.distance_m: must be > 0");
    need(j.omega1 >= 0.0 && j.omega2 >= 0.0, v, "attack.omega1/omega2: must be >= 0");
    need(j.gamma >= 0.0 && j.gamma < 1.0, v, "attack.gamma: must lie in [0, 1)");
    need(j.epsilon >= 0.0 && j.epsilon <= 1.0, v, "attack.epsilon: must lie in [0, 1]");
    need(j.hidden >= 1, v, "attack.hidden: must be >= 1");
    need(j.layers >= 1, v, "attack.layers: must be >= 1");
    need(j.sequence >= 1, v, "attack.sequence: must be >= 1");
    need(j.minibatch >= 1 && j.minibatch <= j.replay, v, "attack.minibatch: must lie in [1, replay]");
    need(j.fnn_history >= 1, v, "attack.fnn_history: must be >= 1");
    need(j.fnn_hidden >= 1, v, "attack.fnn_hidden: must be >= 1");

    const auto& m = c.mitigation;
    need(m.defender.chi >= 0.0 && m.defender.chi <= 1.0, v, "mitigation.chi: must lie in [0, 1]");
    need(m.defender.gamma >= 0.0 && m.defender.gamma < 1.0, v, "mitigation.gamma: must lie in [0, 1)");
    need(m.defender.epsilon >= 0.0 && m.defender.epsilon <= 1.0, v, "mitigation.epsilon: must lie in [0, 1]");
    need(m.defender.signal_samples >= 1, v, "mitigation.signal_samples: must be >= 1");
    need(m.defender.fnn_history >= 1, v, "mitigation.fnn_history: must be >= 1");
    need(m.defender.fnn_hidden >= 1, v, "mitigation.fnn_hidden: must be >= 1");
    need(m.guard_band >= 0.0 && m.guard_band < 1.0, v, "mitigation.guard_band: must lie in [0, 1)");
    need(m.repo_runs >= 10, v, "mitigation.repo_runs: at least 10 monitoring runs are required");
    return v;
}

std::string config_hash(const ScenarioConfig& c) {
    const std::string text = to_json(c).dump();
    const std::uint64_t h = hash_name(text);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace jamslice

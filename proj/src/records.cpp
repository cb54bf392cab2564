#include "jamslice/engine.hpp"

#include "jamslice/errors.hpp"

#include <fstream>

namespace jamslice {

using nlohmann::json;

json to_json(const TtiRecord& t) {
    return json{
        {"tti", t.tti},
        {"phase", t.phase == Phase::Expert ? "expert" : "learner"},
        {"action", t.action},
        {"reward", t.reward},
        {"embb_rate_mbps", t.embb_rate_mbps},
        {"embb_goodput_mbps", t.embb_goodput_mbps},
        {"embb_tx_mbps", t.embb_tx_mbps},
        {"urllc_latency_ms", t.urllc_latency_ms},
        {"embb_queue", t.embb_queue},
        {"urllc_queue", t.urllc_queue},
        {"allocated", t.allocated},
        {"jammed", t.jammed},
        {"jam_power_mw", t.jam_power_mw},
        {"energy_units", t.energy_units},
        {"budget_remaining", t.budget_remaining},
        {"decoys", t.decoys},
        {"decoy_power_mw", t.decoy_power_mw},
        {"jam_hits", t.jam_hits},
        {"jam_on_decoy", t.jam_on_decoy},
        {"mean_sinr", t.mean_sinr},
        {"mean_sinr_db", t.mean_sinr_db},
        {"mean_rx_power_mw", t.mean_rx_power_mw},
        {"suspended", t.suspended},
        {"failed_transmissions", t.failed_transmissions},
    };
}

TtiRecord tti_from_json(const json& j) {
    try {
        TtiRecord t;
        t.tti = j.at("tti").get<std::int64_t>();
        const auto ph = j.at("phase").get<std::string>();
        if (ph != "expert" && ph != "learner") throw ConfigError("record.phase: unknown value '" + ph + "'");
        t.phase = ph == "expert" ? Phase::Expert : Phase::Learner;
        t.action = j.at("action").get<int>();
        t.reward = j.at("reward").get<double>();
        t.embb_rate_mbps = j.at("embb_rate_mbps").get<double>();
        t.embb_goodput_mbps = j.at("embb_goodput_mbps").get<double>();
        t.embb_tx_mbps = j.at("embb_tx_mbps").get<double>();
        t.urllc_latency_ms = j.at("urllc_latency_ms").get<std::vector<double>>();
        t.embb_queue = j.at("embb_queue").get<int>();
        t.urllc_queue = j.at("urllc_queue").get<int>();
        t.allocated = j.at("allocated").get<std::vector<int>>();
        t.jammed = j.at("jammed").get<std::vector<int>>();
        t.jam_power_mw = j.at("jam_power_mw").get<double>();
        t.energy_units = j.at("energy_units").get<std::int64_t>();
        t.budget_remaining = j.at("budget_remaining").get<std::int64_t>();
        t.decoys = j.at("decoys").get<std::vector<int>>();
        t.decoy_power_mw = j.at("decoy_power_mw").get<double>();
        t.jam_hits = j.at("jam_hits").get<int>();
        t.jam_on_decoy = j.at("jam_on_decoy").get<int>();
        t.mean_sinr = j.at("mean_sinr").get<double>();
        t.mean_sinr_db = j.at("mean_sinr_db").get<double>();
        t.mean_rx_power_mw = j.at("mean_rx_power_mw").get<double>();
        t.suspended = j.at("suspended").get<bool>();
        t.failed_transmissions = j.at("failed_transmissions").get<int>();
        return t;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("record: ") + e.what());
    }
}

namespace {

json ledger_json(const PacketLedger& l) {
    return json{{"arrived", l.arrived},
                {"delivered", l.delivered},
                {"dropped_harq", l.dropped_harq},
                {"dropped_overflow", l.dropped_overflow},
                {"queued", l.queued}};
}

PacketLedger ledger_from(const json& j) {
    PacketLedger l;
    l.arrived = j.at("arrived").get<std::int64_t>();
    l.delivered = j.at("delivered").get<std::int64_t>();
    l.dropped_harq = j.at("dropped_harq").get<std::int64_t>();
    l.dropped_overflow = j.at("dropped_overflow").get<std::int64_t>();
    l.queued = j.at("queued").get<std::int64_t>();
    return l;
}

} // namespace

json summary_json(const RunRecord& r) {
    return json{
        {"schema", "jamslice-run v1"},
        {"name", r.name},
        {"seed", r.seed},
        {"config_hash", r.config_hash},
        {"config", r.config},
        {"expert_ttis", r.expert_ttis},
        {"learner_ttis", r.learner_ttis},
        {"records", r.ttis.size()},
        {"jammer_budget_initial", r.jammer_budget_initial},
        {"ledgers",
         {{"expert", {{"embb", ledger_json(r.expert_embb)}, {"urllc", ledger_json(r.expert_urllc)}}},
          {"learner", {{"embb", ledger_json(r.learner_embb)}, {"urllc", ledger_json(r.learner_urllc)}}}}},
    };
}

void write_record(const RunRecord& r, const std::string& summary_path, const std::string& ttis_path) {
    std::ofstream s(summary_path, std::ios::binary);
    if (!s) throw IoError("cannot write " + summary_path);
    s << summary_json(r).dump(2) << '\n';
    std::ofstream t(ttis_path, std::ios::binary);
    if (!t) throw IoError("cannot write " + ttis_path);
    for (const auto& x : r.ttis) {
        json j = to_json(x);
        j["config_hash"] = r.config_hash;
        t << j.dump() << '\n';
    }
    if (!s || !t) throw IoError("write failed for " + summary_path);
}

RunRecord read_record(const std::string& summary_path, const std::string& ttis_path) {
    std::ifstream s(summary_path, std::ios::binary);
    if (!s) throw IoError("cannot read " + summary_path);
    json j;
    try {
        s >> j;
    } catch (const json::exception& e) {
        throw ConfigError(summary_path + ": " + e.what());
    }
    RunRecord r;
    try {
        r.name = j.at("name").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.config_hash = j.at("config_hash").get<std::string>();
        r.config = j.at("config");
        r.expert_ttis = j.at("expert_ttis").get<std::int64_t>();
        r.learner_ttis = j.at("learner_ttis").get<std::int64_t>();
        r.jammer_budget_initial = j.at("jammer_budget_initial").get<std::int64_t>();
        const auto& l = j.at("ledgers");
        r.expert_embb = ledger_from(l.at("expert").at("embb"));
        r.expert_urllc = ledger_from(l.at("expert").at("urllc"));
        r.learner_embb = ledger_from(l.at("learner").at("embb"));
        r.learner_urllc = ledger_from(l.at("learner").at("urllc"));
    } catch (const json::exception& e) {
        throw ConfigError(summary_path + ": " + e.what());
    }
    std::ifstream t(ttis_path, std::ios::binary);
    if (!t) throw IoError("cannot read " + ttis_path);
    std::string line;
    int n = 0;
    while (std::getline(t, line)) {
        ++n;
        if (line.empty()) continue;
        json x;
        try {
            x = json::parse(line);
        } catch (const json::exception& e) {
            throw ConfigError(ttis_path + ":" + std::to_string(n) + ": " + e.what());
        }
        if (x.value("config_hash", std::string()) != r.config_hash)
            throw ConfigError(ttis_path + ":" + std::to_string(n) + ": config hash does not match the summary");
        r.ttis.push_back(tti_from_json(x));
    }
    return r;
}

} // namespace jamslice

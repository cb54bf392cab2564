#include "jamslice/engine.hpp"

#include "jamslice/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

namespace jamslice {

std::span<const TtiRecord> RunRecord::phase(Phase p) const {
    auto first = std::find_if(ttis.begin(), ttis.end(), [&](const TtiRecord& t) { return t.phase == p; });
    auto last = std::find_if(first, ttis.end(), [&](const TtiRecord& t) { return t.phase != p; });
    return {first, last};
}

namespace {

AgentConfig agent_config(const ScenarioConfig& c, bool edge) {
    AgentConfig a = c.agent;
    a.queue_cap = c.queue_cap;
    a.rbs = c.grid.rbgs;
    a.compute_hz = c.topology.compute_hz;
    a.edge_compute = edge;
    return a;
}

double gain_db_to_linear(double loss_db) { return db_to_linear(-loss_db); }

} // namespace

World::World(const ScenarioConfig& cfg, const KnowledgeRepository* repo)
    : cfg_(cfg), repo_(repo), seeds_(cfg.seed) {
    if (auto issues = validate(cfg_); !issues.empty()) throw ConfigError(issues);
    if (cfg_.mitigation.kind == MitigationKind::Suspend && (!repo_ || !repo_->built))
        throw ConfigError("mitigation.kind: suspend needs a knowledge repository");

    TopologyParams tp = cfg_.topology;
    tp.rbs = cfg_.grid.rbgs;
    Rng topo_rng = seeds_.stream("topology");
    topo_ = Topology::build(tp, topo_rng);
    const std::uint64_t channel_seed = seeds_.derive("channel");
    ch_ = build_channel(topo_, cfg_.grid, channel_seed, cfg_.link, cfg_.noise_figure_db);
    const int G = static_cast<int>(topo_.gnbs.size());
    const int U = static_cast<int>(topo_.ues.size());
    const int R = cfg_.grid.rbgs;
    alloc_ = Allocation(G, U, R);

    cell_ues_.resize(G);
    for (const auto& u : topo_.ues) cell_ues_[u.gnb].push_back(u.id);
    embb_ues_ = topo_.ues_of(0, Slice::Embb);
    urllc_ues_ = topo_.ues_of(0, Slice::Urllc);

    // Rate estimate the scheduler sizes packets with: neighbors at their mean activity.
    const double tti = cfg_.tti_s();
    est_bits_per_rb_.assign(U, 0.0);
    for (int u : cell_ues_[0]) {
        double interference = 0.0;
        for (int j = 1; j < G; ++j) interference += ch_.p(j, 0) * ch_.g(j, u, 0);
        const double s = ch_.p(0, 0) * ch_.g(0, u, 0) / (ch_.noise_mw() + cfg_.neighbor_activity * interference);
        est_bits_per_rb_[u] = std::max(1.0, shannon_bps(ch_.rb_bandwidth_hz, s) * tti);
    }

    // Jammer sits `distance_m` from the target gNB with a seeded bearing; it
    // has an isotropic antenna, indoor UEs add the penetration loss.
    Rng place = seeds_.stream("jammer-position");
    const double bearing = 2.0 * std::numbers::pi * uniform01(place);
    const Position origin = topo_.gnb(0).pos;
    const Position jam{origin.x_m + cfg_.jammer.distance_m * std::cos(bearing),
                       origin.y_m + cfg_.jammer.distance_m * std::sin(bearing)};
    const std::uint64_t jam_seed = seeds_.derive("jammer-shadowing");
    const double sigma = cfg_.link.shadowing_sigma_db;
    jam_to_ue_.assign(U, 0.0);
    for (const auto& u : topo_.ues) {
        const double d_km = std::max(distance_m(jam, u.pos), 1.0) / 1000.0;
        jam_to_ue_[u.id] = gain_db_to_linear(path_loss_db(d_km) + shadowing_db(jam_seed, 0, u.id, sigma) +
                                             cfg_.link.penetration_loss_db);
    }
    gnb_to_jam_.assign(G, 0.0);
    for (const auto& g : topo_.gnbs) {
        const double d_km = std::max(distance_m(jam, g.pos), 1.0) / 1000.0;
        gnb_to_jam_[g.id] = gain_db_to_linear(path_loss_db(d_km) + shadowing_db(jam_seed, 1, g.id, sigma) -
                                              cfg_.link.antenna_gain_db);
    }
    jam_noise_mw_ = ch_.noise_mw();
    e_theta_dbm_ = detection_threshold_dbm(t_max_dbm(cfg_.grid.rb_bandwidth_mhz()), cfg_.jammer.x_r_dbm);
    sensing_.tti_us = cfg_.tti_us;
    decode_threshold_ = db_to_linear(cfg_.service.decode_threshold_db);

    embb_q_ = SliceQueue(Slice::Embb, cfg_.queue_cap);
    urllc_q_ = SliceQueue(Slice::Urllc, cfg_.queue_cap);
    sched_rng_ = seeds_.stream("scheduler");
    neighbor_rng_ = seeds_.stream("neighbors");
    agent_rng_ = seeds_.stream("agent");
    jam_rng_ = seeds_.stream("jammer");
    def_rng_ = seeds_.stream("defender");

    expert_ = std::make_unique<SlicingAgent>(agent_config(cfg_, false), seeds_.derive("expert-net"));
    agent_ = expert_.get();
    jammer_ = make_jammer(cfg_.attack, cfg_.jammer, R, seeds_.derive("jammer-net"));
    if (cfg_.mitigation.kind == MitigationKind::DecoyDrl) decoy_.emplace(cfg_.mitigation.defender, R);
    if (cfg_.mitigation.kind == MitigationKind::DecoyFnn)
        fnn_defender_.emplace(cfg_.mitigation.defender, R, seeds_.derive("defender-net"));
    last_jammed_.assign(R, 0);
}

void World::begin_phase(Phase p) {
    phase_ = p;
    if (p == Phase::Learner) {
        learner_ = std::make_unique<SlicingAgent>(agent_config(cfg_, true), seeds_.derive("learner-net"));
        if (cfg_.expert_ttis > 0) {
            expert_snapshot_ = expert_->snapshot();
            learner_->attach_transfer(expert_snapshot_, &expert_->online());
        }
        agent_ = learner_.get();
    } else {
        agent_ = expert_.get();
    }
    const auto idx = static_cast<std::uint64_t>(p);
    traffic_.emplace(cfg_.traffic, cfg_.tti_s());
    traffic_rng_ = seeds_.stream("traffic", idx);
    embb_q_ = SliceQueue(Slice::Embb, cfg_.queue_cap);
    urllc_q_ = SliceQueue(Slice::Urllc, cfg_.queue_cap);
    embb_ledger_ = {};
    urllc_ledger_ = {};
    agent_reward_.reset();
    defender_reward_.reset();
    std::fill(last_jammed_.begin(), last_jammed_.end(), 0);
    suspend_next_ = false;
    if (jammer_) jammer_->reset_budget();
    admit(Slice::Embb, cfg_.initial_queue.embb);
    admit(Slice::Urllc, cfg_.initial_queue.urllc);
}

std::pair<PacketLedger, PacketLedger> World::end_phase() {
    embb_ledger_.queued = embb_q_.size();
    urllc_ledger_.queued = urllc_q_.size();
    return {embb_ledger_, urllc_ledger_};
}

void World::admit(Slice s, int count) {
    const auto& ues = s == Slice::Embb ? embb_ues_ : urllc_ues_;
    const int bits = 8 * (s == Slice::Embb ? cfg_.traffic.embb_packet_bytes : cfg_.traffic.urllc_packet_bytes);
    std::uniform_int_distribution<std::size_t> pick(0, ues.size() - 1);
    for (int i = 0; i < count; ++i) {
        Packet p;
        p.id = next_packet_++;
        p.ue = ues[pick(traffic_rng_)];
        p.slice = s;
        p.bits = p.remaining_bits = bits;
        p.arrival_tti = p.eligible_tti = tti_;
        ++ledger(s).arrived;
        if (!queue(s).push(p)) ++ledger(s).dropped_overflow;
    }
}

double World::processing_ms(Slice s, int bits) const {
    if (!agent_->actions().edge_compute()) return cfg_.service.cloud_delay_ms;
    const ComputeSplit& c = alloc_.compute(0);
    const double hz = s == Slice::Embb ? c.embb_hz : c.urllc_hz;
    return bits * cfg_.service.cycles_per_bit / hz * 1e3;
}

std::vector<World::Assignment> World::schedule(const SliceAction& a, std::vector<int>& owner) {
    const int R = cfg_.grid.rbgs;
    owner.assign(R, -1);
    alloc_.clear_gnb(0);
    alloc_.compute(0) = {a.cpu_embb_hz, a.cpu_urllc_hz};
    std::vector<Assignment> out;

    auto fill = [&](Slice s, std::vector<int> free_rbs) {
        std::size_t next = 0;
        for (const Packet& p : queue(s).packets()) {
            if (next == free_rbs.size()) break;
            if (p.eligible_tti > tti_) continue;
            const auto want = static_cast<std::size_t>(std::ceil(p.remaining_bits / est_bits_per_rb_[p.ue]));
            const std::size_t n = std::min(std::max<std::size_t>(want, 1), free_rbs.size() - next);
            Assignment as{p.id, s, {}};
            for (std::size_t k = 0; k < n; ++k) {
                const int r = free_rbs[next++];
                owner[r] = p.ue;
                alloc_.set(0, p.ue, r);
                as.rbs.push_back(r);
            }
            out.push_back(std::move(as));
        }
    };
    std::vector<int> low, high;
    for (int r = 0; r < a.rb_embb; ++r) low.push_back(r);
    for (int r = R - 1; r >= R - a.rb_urllc; --r) high.push_back(r);
    fill(Slice::Embb, low);
    fill(Slice::Urllc, high);
    return out;
}

TtiRecord run_tti(World& w) {
    const ScenarioConfig& cfg = w.cfg_;
    const int R = cfg.grid.rbgs;
    const int G = static_cast<int>(w.topo_.gnbs.size());
    const double tti_s = cfg.tti_s();
    const double tti_ms = cfg.tti_us / 1000.0;

    TtiRecord rec;
    rec.tti = w.tti_;
    rec.phase = w.phase_;

    // Arrivals.
    const Arrivals arr = w.traffic_->next(w.traffic_rng_);
    w.admit(Slice::Embb, arr.embb);
    w.admit(Slice::Urllc, arr.urllc);

    // Slicing decision.
    const QueueState s{std::min(w.embb_q_.size(), cfg.queue_cap), std::min(w.urllc_q_.size(), cfg.queue_cap)};
    const bool frozen = w.suspend_next_;
    const SliceAction action =
        frozen ? w.agent_->step_frozen(s) : w.agent_->step(s, w.agent_reward_.value_or(0.0), w.agent_rng_);
    rec.action = action.index;
    rec.suspended = frozen;

    // Neighbors load their RBs at random, the target gNB serves its queues.
    for (int j = 1; j < G; ++j) {
        w.alloc_.clear_gnb(j);
        const auto& ues = w.cell_ues_[j];
        std::uniform_int_distribution<std::size_t> pick(0, ues.size() - 1);
        for (int r = 0; r < R; ++r) {
            const bool on = uniform01(w.neighbor_rng_) < cfg.neighbor_activity;
            const int ue = ues[pick(w.neighbor_rng_)];
            if (on) w.alloc_.set(j, ue, r);
        }
    }
    std::vector<int> owner;
    const auto assignments = w.schedule(action, owner);
    if (const auto bad = check_constraints(w.alloc_, w.topo_); !bad.empty())
        throw DomainError(std::string("scheduler produced an infeasible allocation: ") + bad.front().detail);
    Bits allocated(R, 0);
    for (int r = 0; r < R; ++r) {
        allocated[r] = owner[r] >= 0 ? 1 : 0;
        if (allocated[r]) rec.allocated.push_back(r);
    }

    // Decoys on vacant RBs.
    const double rb_power = w.ch_.p(0, 0);
    DecoyPlan plan;
    if (w.decoy_ || w.fnn_defender_) {
        const DefenderState ds = defender_state(allocated, w.last_jammed_);
        plan = w.decoy_ ? w.decoy_->step(ds, w.defender_reward_, rb_power, w.def_rng_)
                        : w.fnn_defender_->step(ds, rb_power, w.def_rng_);
        for (int r : plan.rbs)
            if (allocated[r]) throw DomainError("decoy placed on an allocated RB");
    }
    std::vector<double> decoy_mw(R, 0.0);
    for (std::size_t i = 0; i < plan.rbs.size(); ++i) decoy_mw[plan.rbs[i]] = plan.power_mw[i];
    rec.decoys = plan.rbs;
    rec.decoy_power_mw = decoy_power_total(plan);

    // Sensing and jamming.
    std::vector<double> clean_sinr(R, 0.0);
    for (int r = 0; r < R; ++r)
        if (owner[r] >= 0) clean_sinr[r] = rb_sinr(w.ch_, w.alloc_, owner[r], 0, r);
    JammerAction jam;
    jam.power_mw.assign(R, 0.0);
    SensingReport report;
    if (w.jammer_) {
        std::vector<double> rx(R, 0.0);
        for (int r = 0; r < R; ++r)
            rx[r] = ((owner[r] >= 0 ? w.ch_.p(0, r) : 0.0) + decoy_mw[r]) * w.gnb_to_jam_[0];
        report = sense_tti(rx, w.jam_noise_mw_, w.e_theta_dbm_, w.sensing_);
        jam = w.jammer_->act(JamObservation{w.tti_, &report, clean_sinr}, w.jam_rng_);
        if (jam.power_mw.size() != static_cast<std::size_t>(R)) jam.power_mw.resize(R, 0.0);
    }
    rec.jammed = jam.jammed();
    rec.jam_power_mw = jam.total_mw();
    rec.energy_units = jam.energy_units;
    if (w.jammer_ && w.jammer_->ledger()) rec.budget_remaining = w.jammer_->ledger()->remaining();
    for (int r : rec.jammed) {
        rec.jam_hits += allocated[r];
        rec.jam_on_decoy += decoy_mw[r] > 0.0 ? 1 : 0;
    }

    // Realization.
    std::vector<double> sinr(R, 0.0), rx_power(R, 0.0);
    std::vector<std::uint8_t> ok(R, 0);
    std::vector<double> alloc_sinr;
    double power_sum = 0.0;
    for (int r = 0; r < R; ++r) {
        const int u = owner[r];
        if (u < 0) continue;
        const double jam_rx = jam.power_mw[r] * w.jam_to_ue_[u];
        sinr[r] = rb_sinr(w.ch_, w.alloc_, u, 0, r, jam_rx);
        const double signal = w.ch_.p(0, r) * w.ch_.g(0, u, r);
        // SINR = S / (N + I + J), so the in-band total is S + S / SINR.
        rx_power[r] = signal + signal / sinr[r];
        ok[r] = sinr[r] >= w.decode_threshold_ ? 1 : 0;
        alloc_sinr.push_back(sinr[r]);
        power_sum += rx_power[r];
    }
    rec.mean_sinr = mitigation_reward(alloc_sinr);
    rec.mean_rx_power_mw = alloc_sinr.empty() ? 0.0 : power_sum / static_cast<double>(alloc_sinr.size());

    double embb_tx_bits = 0.0, embb_done_bits = 0.0, embb_rate = 0.0;
    std::vector<double> urllc_delays;
    for (const auto& as : assignments) {
        SliceQueue& q = w.queue(as.slice);
        auto it = std::find_if(q.packets().begin(), q.packets().end(),
                               [&](const Packet& p) { return p.id == as.packet; });
        Packet& p = *it;
        ++p.tx_ttis;
        if (as.slice == Slice::Embb)
            for (int r : as.rbs) embb_rate += shannon_bps(w.ch_.rb_bandwidth_hz, sinr[r]);
        const bool all_ok = std::all_of(as.rbs.begin(), as.rbs.end(), [&](int r) { return ok[r] != 0; });
        if (!all_ok) {
            ++rec.failed_transmissions;
            if (p.retransmissions >= cfg.service.max_retransmissions) {
                ++w.ledger(as.slice).dropped_harq;
                q.packets().erase(it);
                continue;
            }
            ++p.retransmissions;
            p.remaining_bits = p.bits;
            p.eligible_tti = w.tti_ + 1 + cfg.service.harq_rtt_ttis;
            continue;
        }
        double carried = 0.0;
        for (int r : as.rbs) carried += shannon_bps(w.ch_.rb_bandwidth_hz, sinr[r]) * tti_s;
        const double used = std::min<double>(carried, p.remaining_bits);
        if (as.slice == Slice::Embb) embb_tx_bits += used;
        p.remaining_bits -= static_cast<int>(std::ceil(used - 1e-9));
        if (p.remaining_bits > 0) continue;
        ++w.ledger(as.slice).delivered;
        if (as.slice == Slice::Embb) {
            embb_done_bits += p.bits;
        } else {
            DelayBreakdown d;
            const double elapsed = static_cast<double>(w.tti_ - p.arrival_tti + 1) * tti_ms;
            d.tx_ms = p.tx_ttis * tti_ms;
            d.rtx_ms = p.retransmissions * cfg.service.harq_rtt_ttis * tti_ms;
            d.queue_ms = std::max(0.0, elapsed - d.tx_ms - d.rtx_ms);
            d.at_edge = w.agent_->actions().edge_compute();
            (d.at_edge ? d.edge_ms : d.cloud_ms) = w.processing_ms(Slice::Urllc, p.bits);
            urllc_delays.push_back(total_delay_ms(d));
        }
        q.packets().erase(it);
    }
    rec.embb_rate_mbps = embb_rate / 1e6;
    rec.embb_tx_mbps = embb_tx_bits / tti_s / 1e6;
    rec.embb_goodput_mbps = embb_done_bits / tti_s / 1e6;
    rec.urllc_latency_ms = urllc_delays;

    // Agent reward for the decision just taken.
    const double proc = w.processing_ms(Slice::Urllc, 8 * cfg.traffic.urllc_packet_bytes);
    double D;
    if (!urllc_delays.empty()) {
        D = std::accumulate(urllc_delays.begin(), urllc_delays.end(), 0.0) / static_cast<double>(urllc_delays.size());
    } else if (!w.urllc_q_.packets().empty()) {
        D = static_cast<double>(w.tti_ - w.urllc_q_.packets().front().arrival_tti + 1) * tti_ms + proc;
    } else {
        D = tti_ms + proc;
    }
    rec.reward = objective_reward(rec.embb_tx_mbps, D, cfg.weights);
    w.agent_reward_ = rec.reward;

    // Feedback to the adversary and the defenses.
    for (double x : alloc_sinr) rec.mean_sinr_db += linear_to_db(std::max(x, 1e-12));
    if (!alloc_sinr.empty()) rec.mean_sinr_db /= static_cast<double>(alloc_sinr.size());
    if (w.jammer_) w.jammer_->feedback(JamFeedback{rec.mean_sinr_db, !alloc_sinr.empty(), report.busy});
    w.defender_reward_ = mitigation_reward(alloc_sinr);
    std::fill(w.last_jammed_.begin(), w.last_jammed_.end(), 0);
    for (int r : rec.jammed) w.last_jammed_[r] = 1;
    w.suspend_next_ = false;
    if (cfg.mitigation.kind == MitigationKind::Suspend && !alloc_sinr.empty())
        w.suspend_next_ = suspend_learning_step(*w.repo_, rec.mean_rx_power_mw, rec.mean_sinr,
                                                cfg.mitigation.guard_band) == SuspendDecision::Suspend;

    rec.embb_queue = w.embb_q_.size();
    rec.urllc_queue = w.urllc_q_.size();
    ++w.tti_;
    return rec;
}

RunRecord run_scenario(const ScenarioConfig& cfg, const KnowledgeRepository* repo) {
    if (auto issues = validate(cfg); !issues.empty()) throw ConfigError(issues);
    std::optional<KnowledgeRepository> own;
    if (cfg.mitigation.kind == MitigationKind::Suspend && (!repo || !repo->built)) {
        own = build_repo_for(cfg, 1);
        repo = &*own;
    }
    World world(cfg, repo);
    RunRecord out;
    out.name = cfg.name;
    out.seed = cfg.seed;
    out.config_hash = config_hash(cfg);
    out.config = to_json(cfg);
    out.expert_ttis = cfg.expert_ttis;
    out.learner_ttis = cfg.learner_ttis;
    out.jammer_budget_initial = world.jammer() && world.jammer()->ledger() ? world.jammer()->ledger()->initial() : 0;
    out.ttis.reserve(static_cast<std::size_t>(cfg.expert_ttis + cfg.learner_ttis));
    if (cfg.expert_ttis > 0) {
        world.begin_phase(Phase::Expert);
        for (int t = 0; t < cfg.expert_ttis; ++t) out.ttis.push_back(run_tti(world));
        std::tie(out.expert_embb, out.expert_urllc) = world.end_phase();
    }
    world.begin_phase(Phase::Learner);
    for (int t = 0; t < cfg.learner_ttis; ++t) out.ttis.push_back(run_tti(world));
    std::tie(out.learner_embb, out.learner_urllc) = world.end_phase();
    return out;
}

MonitorSample monitor_sample(const RunRecord& r) {
    MonitorSample m;
    const auto tt = r.phase(Phase::Learner);
    int n = 0;
    for (const auto& t : tt) {
        m.reward += t.reward;
        if (t.allocated.empty()) continue;
        m.power_mw += t.mean_rx_power_mw;
        m.sinr += t.mean_sinr;
        ++n;
    }
    if (!tt.empty()) m.reward /= static_cast<double>(tt.size());
    if (n > 0) {
        m.power_mw /= n;
        m.sinr /= n;
    }
    return m;
}

namespace {

ScenarioConfig repo_variant(const ScenarioConfig& cfg) {
    ScenarioConfig c = cfg;
    c.attack = AttackKind::None;
    c.mitigation.kind = MitigationKind::None;
    c.seed = cfg.mitigation.repo_seed;
    c.name = cfg.name + "-repo";
    return c;
}

std::vector<BatchItem> run_plain(const std::vector<ScenarioConfig>& configs, int parallel,
                                 const std::map<std::string, KnowledgeRepository>& repos) {
    std::vector<BatchItem> out(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                const KnowledgeRepository* repo = nullptr;
                if (configs[i].mitigation.kind == MitigationKind::Suspend)
                    repo = &repos.at(config_hash(repo_variant(configs[i])));
                out[i].record = run_scenario(configs[i], repo);
                out[i].ok = true;
            } catch (const std::exception& e) {
                out[i].ok = false;
                out[i].error = e.what();
            }
        }
    };
    const int n = std::clamp(parallel, 1, std::max(1, static_cast<int>(configs.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

} // namespace

KnowledgeRepository build_repo_for(const ScenarioConfig& cfg, int parallel) {
    const ScenarioConfig base = repo_variant(cfg);
    std::vector<ScenarioConfig> runs;
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < cfg.mitigation.repo_runs; ++i) {
        ScenarioConfig c = base;
        c.seed = cfg.mitigation.repo_seed + static_cast<std::uint64_t>(i);
        runs.push_back(c);
        seeds.push_back(c.seed);
    }
    const auto items = run_plain(runs, parallel, {});
    std::map<std::uint64_t, MonitorSample> samples;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!items[i].ok) throw DomainError("knowledge repository run failed: " + items[i].error);
        samples[runs[i].seed] = monitor_sample(items[i].record);
    }
    return build_knowledge_repo([&](std::uint64_t s) { return samples.at(s); }, seeds);
}

std::vector<BatchItem> run_batch(const std::vector<ScenarioConfig>& configs, int parallel) {
    std::map<std::string, KnowledgeRepository> repos;
    std::map<std::string, std::string> repo_errors;
    for (const auto& c : configs) {
        if (c.mitigation.kind != MitigationKind::Suspend) continue;
        const std::string key = config_hash(repo_variant(c));
        if (repos.count(key) || repo_errors.count(key)) continue;
        try {
            repos[key] = build_repo_for(c, parallel);
        } catch (const std::exception& e) {
            repo_errors[key] = e.what();
        }
    }
    std::vector<ScenarioConfig> runnable;
    std::vector<std::size_t> where;
    std::vector<BatchItem> out(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (configs[i].mitigation.kind == MitigationKind::Suspend) {
            auto e = repo_errors.find(config_hash(repo_variant(configs[i])));
            if (e != repo_errors.end()) {
                out[i].error = e->second;
                continue;
            }
        }
        runnable.push_back(configs[i]);
        where.push_back(i);
    }
    auto done = run_plain(runnable, parallel, repos);
    for (std::size_t k = 0; k < done.size(); ++k) out[where[k]] = std::move(done[k]);
    return out;
}

std::vector<ScenarioConfig> seed_sweep(const ScenarioConfig& base, int count, std::uint64_t offset) {
    std::vector<ScenarioConfig> out;
    for (int i = 0; i < count; ++i) {
        ScenarioConfig c = base;
        c.seed = base.seed + offset + static_cast<std::uint64_t>(i);
        out.push_back(c);
    }
    return out;
}

} // namespace jamslice

#include "jamslice/attacks.hpp"

#include "jamslice/dtrl.hpp"
#include "jamslice/errors.hpp"
#include "jamslice/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jamslice {

double cja_power(std::span<const double> l_values, int rb_count) {
    if (rb_count <= 0) throw DomainError("cja_power: RB count must be > 0");
    double sum = 0.0;
    for (double l : l_values) sum += l;
    return sum * sum / rb_count;
}

double t_max_dbm(double rb_bandwidth_mhz) {
    if (rb_bandwidth_mhz <= 0.0) throw DomainError("t_max: bandwidth must be > 0");
    return 10.0 * std::log10(3.16228e-8 * rb_bandwidth_mhz);
}

double detection_threshold_dbm(double t_max, double x_r_dbm) { return std::min(t_max + 10.0, x_r_dbm); }

int slots_per_tti(const SensingParams& p) { return static_cast<int>(std::floor(p.tti_us / p.slot_us)); }

SlotVerdict sense_slot(std::span<const double> trace_dbm, double sample_us, double slot_us, double e_theta_dbm,
                       double idle_us) {
    if (sample_us <= 0.0) throw DomainError("sense_slot: sample period must be > 0");
    const auto needed = static_cast<std::size_t>(std::llround(slot_us / sample_us));
    if (trace_dbm.size() < needed) throw DomainError("sense_slot: trace shorter than one sensing slot");
    double below_us = 0.0;
    for (std::size_t i = 0; i < needed; ++i)
        if (trace_dbm[i] < e_theta_dbm) below_us += sample_us;
    return below_us >= idle_us - 1e-9 ? SlotVerdict::Idle : SlotVerdict::Busy;
}

SensingReport sense_tti(std::span<const double> rx_mw, double noise_mw, double e_theta_dbm, const SensingParams& p) {
    const int slots = slots_per_tti(p);
    const auto samples = static_cast<std::size_t>(std::llround(p.slot_us / p.sample_us));
    SensingReport rep;
    rep.slots.resize(rx_mw.size());
    rep.busy.assign(rx_mw.size(), 0);
    std::vector<double> trace(samples);
    for (std::size_t r = 0; r < rx_mw.size(); ++r) {
        // Emitters hold their power for the whole TTI, so every sample of every
        // slot reads the same level.
        std::fill(trace.begin(), trace.end(), mw_to_dbm(rx_mw[r] + noise_mw));
        int busy = 0;
        for (int s = 0; s < slots; ++s) {
            const SlotVerdict v = sense_slot(trace, p.sample_us, p.slot_us, e_theta_dbm, p.idle_us);
            rep.slots[r].push_back(v);
            busy += v == SlotVerdict::Busy;
        }
        rep.busy[r] = 2 * busy > slots ? 1 : 0;
    }
    return rep;
}

std::vector<double> drlja_state(const SensingReport& report, double budget_fraction) {
    std::vector<double> s(report.busy.begin(), report.busy.end());
    s.push_back(std::clamp(budget_fraction, 0.0, 1.0));
    return s;
}

double drlja_reward(double sinr_after, double energy_spent, double w1, double w2) {
    if (energy_spent < 0.0) throw DomainError("drlja_reward: energy must be >= 0");
    return -w1 * sinr_after - w2 * energy_spent;
}

void MinMaxNormalizer::observe(double x) {
    if (!seen_) {
        lo_ = hi_ = x;
        seen_ = true;
        return;
    }
    lo_ = std::min(lo_, x);
    hi_ = std::max(hi_, x);
}

double MinMaxNormalizer::normalize(double x) const {
    if (!seen_ || hi_ <= lo_) return 0.0;
    return std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0);
}

void EnergyLedger::spend(std::int64_t units) {
    if (units < 0) throw DomainError("energy: negative spend");
    if (!can_spend(units)) throw DomainError("energy: spend exceeds remaining budget");
    spent_ += units;
}

const char* to_string(AttackKind k) {
    switch (k) {
        case AttackKind::None: return "none";
        case AttackKind::Cja: return "cja";
        case AttackKind::Rja: return "rja";
        case AttackKind::DrlJa: return "drl-ja";
        case AttackKind::Fnn: return "fnn";
    }
    return "?";
}

std::optional<AttackKind> parse_attack(const std::string& s) {
    for (auto k : {AttackKind::None, AttackKind::Cja, AttackKind::Rja, AttackKind::DrlJa, AttackKind::Fnn})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

std::vector<int> JammerAction::jammed() const {
    std::vector<int> out;
    for (int r = 0; r < static_cast<int>(power_mw.size()); ++r)
        if (power_mw[r] > 0.0) out.push_back(r);
    return out;
}

double JammerAction::total_mw() const { return std::accumulate(power_mw.begin(), power_mw.end(), 0.0); }

// ---------------------------------------------------------------- constant / random

ConstantJammer::ConstantJammer(const JammerParams& p, int rbs)
    : p_(p), rbs_(rbs), busy_count_(rbs, 0.0), sinr_sum_(rbs, 0.0) {
    if (p.subband_rbs < 1 || p.subband_rbs > rbs) throw ConfigError("jammer: subband width must lie in [1, rbs]");
}

bool ConstantJammer::monitor(const JamObservation& obs) {
    if (armed_) return true;
    if (obs.sensing) {
        for (int r = 0; r < rbs_; ++r) busy_count_[r] += obs.sensing->busy[r];
    }
    for (int r = 0; r < rbs_ && r < static_cast<int>(obs.rb_sinr.size()); ++r) sinr_sum_[r] += obs.rb_sinr[r];
    if (++seen_ < p_.monitor_ttis) return false;

    const int w = p_.subband_rbs;
    double best = -1.0;
    for (int s = 0; s + w <= rbs_; ++s) {
        const double load = std::accumulate(busy_count_.begin() + s, busy_count_.begin() + s + w, 0.0);
        if (load > best) {
            best = load;
            start_ = s;
        }
    }
    std::vector<double> l;
    for (int r = start_; r < start_ + w; ++r)
        l.push_back(busy_count_[r] > 0.0 ? sinr_sum_[r] / busy_count_[r] : 0.0);
    power_mw_ = std::min(cja_power(l, w), dbm_to_mw(p_.max_power_dbm));
    armed_ = true;
    return true;
}

JammerAction ConstantJammer::act(const JamObservation& obs, Rng&) {
    JammerAction a;
    a.power_mw.assign(rbs_, 0.0);
    if (!monitor(obs)) return a;
    for (int r = start_; r < start_ + p_.subband_rbs; ++r) a.power_mw[r] = power_mw_;
    a.energy_units = 2LL * p_.subband_rbs;
    return a;
}

JammerAction RandomJammer::act(const JamObservation& obs, Rng& rng) {
    JammerAction a;
    a.power_mw.assign(rbs_, 0.0);
    if (!monitor(obs)) return a;
    const int w = p_.subband_rbs;
    const int k = std::uniform_int_distribution<int>(0, w)(rng);
    std::vector<int> band(w);
    std::iota(band.begin(), band.end(), start_);
    for (int i = 0; i < k; ++i) {
        const int j = i + std::uniform_int_distribution<int>(0, w - 1 - i)(rng);
        std::swap(band[i], band[j]);
        a.power_mw[band[i]] = power_mw_;
    }
    a.energy_units = 2LL * k;
    return a;
}

// ---------------------------------------------------------------- patterns

JamPattern jam_pattern(int index) {
    if (index < 0 || index >= kJamPatterns) throw LookupError("jam_pattern: index out of range");
    JamPattern p;
    if (index == 0) return p;
    const int i = index - 1;
    p.silent = false;
    p.region = i / 4;
    p.half_count = (i / 2) % 2 == 1;
    p.half_power = i % 2 == 1;
    return p;
}

JammerAction apply_jam_pattern(int index, std::span<const std::uint8_t> busy, const JammerParams& p,
                               const EnergyLedger& ledger, Rng& rng) {
    const int rbs = static_cast<int>(busy.size());
    JammerAction a;
    a.power_mw.assign(rbs, 0.0);
    const JamPattern pat = jam_pattern(index);
    if (pat.silent) return a;
    std::vector<int> cand;
    for (int r = 0; r < rbs; ++r) {
        const bool lower = 2 * r < rbs;
        const bool in_region = pat.region == 0 || (pat.region == 1 && lower) || (pat.region == 2 && !lower);
        if (in_region && busy[r]) cand.push_back(r);
    }
    const int want = pat.half_count ? (p.max_rbs + 1) / 2 : p.max_rbs;
    const std::int64_t unit = pat.half_power ? 1 : 2;
    int n = std::min<int>(want, static_cast<int>(cand.size()));
    n = static_cast<int>(std::min<std::int64_t>(n, ledger.remaining() / unit));
    const double power = dbm_to_mw(p.power_dbm) * (pat.half_power ? 0.5 : 1.0);
    for (int i = 0; i < n; ++i) {
        const int j = i + std::uniform_int_distribution<int>(0, static_cast<int>(cand.size()) - 1 - i)(rng);
        std::swap(cand[i], cand[j]);
        a.power_mw[cand[i]] = power;
    }
    a.energy_units = unit * n;
    return a;
}

// ---------------------------------------------------------------- DRL jammer

DrlJammer::DrlJammer(const JammerParams& p, int rbs, std::uint64_t seed)
    : p_(p), rbs_(rbs), ledger_(p.budget_units), online_({rbs + 1, p.hidden, p.layers, kJamPatterns}) {
    if (p.max_rbs < 1) throw ConfigError("jammer: max_rbs must be >= 1");
    Rng rng(seed);
    online_.init_uniform(rng, p.init_range);
    target_ = online_;
}

JammerAction DrlJammer::act(const JamObservation& obs, Rng& rng) {
    if (!obs.sensing) throw ConfigError("drl jammer: sensing report required");
    const double frac = ledger_.initial() > 0
                            ? static_cast<double>(ledger_.remaining()) / static_cast<double>(ledger_.initial())
                            : 0.0;
    history_.push_back(drlja_state(*obs.sensing, frac));
    while (static_cast<int>(history_.size()) > p_.sequence) history_.pop_front();
    Sequence seq(history_.begin(), history_.end());

    if (pending_) {
        pending_->s1 = seq;
        replay_.push_back(std::move(*pending_));
        if (static_cast<int>(replay_.size()) > p_.replay) replay_.pop_front();
        pending_.reset();
    }
    ++steps_;
    if (p_.train_interval > 0 && steps_ % p_.train_interval == 0) train(rng);
    if (p_.copy_interval > 0 && steps_ % p_.copy_interval == 0) target_ = online_;

    const Vec q = online_.forward(seq);
    int a = epsilon_greedy(q, p_.epsilon, rng);
    JammerAction action;
    if (ledger_.remaining() <= 0) {
        a = 0;
        action.power_mw.assign(rbs_, 0.0);
    } else {
        action = apply_jam_pattern(a, obs.sensing->busy, p_, ledger_, rng);
    }
    ledger_.spend(action.energy_units);
    pending_ = Transition{std::move(seq), a, 0.0, {}};
    last_units_ = action.energy_units;
    last_pattern_ = a;
    return action;
}

void DrlJammer::feedback(const JamFeedback& fb) {
    if (!pending_) return;
    const auto e = static_cast<double>(last_units_);
    energy_norm_.observe(e);
    // An idle victim counts as the worst outcome for the jammer.
    double l = 1.0;
    if (fb.victim_active) {
        sinr_norm_.observe(fb.mean_sinr_db);
        l = sinr_norm_.normalize(fb.mean_sinr_db);
    }
    pending_->r = drlja_reward(l, energy_norm_.normalize(e), p_.omega1, p_.omega2);
}

void DrlJammer::train(Rng& rng) {
    const auto B = static_cast<std::size_t>(p_.minibatch);
    if (B == 0 || replay_.size() < B) return;
    std::vector<std::size_t> idx(replay_.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < B; ++i) {
        const std::size_t j = i + std::uniform_int_distribution<std::size_t>(0, idx.size() - 1 - i)(rng);
        std::swap(idx[i], idx[j]);
    }
    Vec grad(online_.param_count(), 0.0);
    std::vector<double> target(kJamPatterns, 0.0), weights(kJamPatterns, 0.0);
    for (std::size_t i = 0; i < B; ++i) {
        const Transition& t = replay_[idx[i]];
        const Vec qn = target_.forward(t.s1);
        std::fill(weights.begin(), weights.end(), 0.0);
        weights[t.a] = 2.0 / static_cast<double>(B);
        target[t.a] = t.r + p_.gamma * *std::max_element(qn.begin(), qn.end());
        online_.accumulate_gradient(t.s, target, weights, grad);
    }
    sgd_step(online_.params(), grad, p_.learning_rate, p_.grad_clip);
}

// ---------------------------------------------------------------- FNN jammer

FnnJammer::FnnJammer(const JammerParams& p, int rbs, std::uint64_t seed)
    : p_(p), rbs_(rbs), ledger_(p.budget_units),
      net_({p.fnn_history * rbs, p.fnn_hidden, p.fnn_hidden, rbs}) {
    if (p.fnn_history < 1) throw ConfigError("fnn jammer: history must be >= 1");
    Rng rng(seed);
    net_.init_uniform(rng, p.fnn_init_range);
}

Vec FnnJammer::input() const {
    Vec x;
    x.reserve(static_cast<std::size_t>(p_.fnn_history) * rbs_);
    for (const auto& occ : history_) x.insert(x.end(), occ.begin(), occ.end());
    return x;
}

std::optional<int> FnnJammer::predict() const {
    if (static_cast<int>(history_.size()) < p_.fnn_history) return std::nullopt;
    const Vec probs = net_.forward(input());
    return argmax(probs);
}

void FnnJammer::observe(std::span<const std::uint8_t> occupancy) {
    if (static_cast<int>(history_.size()) == p_.fnn_history) {
        const double n = std::accumulate(occupancy.begin(), occupancy.end(), 0.0);
        if (n > 0.0) {
            Vec t(rbs_);
            for (int r = 0; r < rbs_; ++r) t[r] = occupancy[r] / n;
            net_.train(input(), t, p_.fnn_learning_rate);
        }
        history_.pop_front();
    }
    history_.emplace_back(occupancy.begin(), occupancy.end());
}

JammerAction FnnJammer::act(const JamObservation& obs, Rng&) {
    JammerAction a;
    a.power_mw.assign(rbs_, 0.0);
    const auto target = predict();
    if (target && ledger_.can_spend(2)) {
        a.power_mw[*target] = dbm_to_mw(p_.power_dbm);
        a.energy_units = 2;
        ledger_.spend(2);
    }
    if (obs.sensing) observe(obs.sensing->busy);
    return a;
}

void FnnJammer::feedback(const JamFeedback&) {}

std::unique_ptr<Jammer> make_jammer(AttackKind kind, const JammerParams& p, int rbs, std::uint64_t seed) {
    switch (kind) {
        case AttackKind::None: return nullptr;
        case AttackKind::Cja: return std::make_unique<ConstantJammer>(p, rbs);
        case AttackKind::Rja: return std::make_unique<RandomJammer>(p, rbs);
        case AttackKind::DrlJa: return std::make_unique<DrlJammer>(p, rbs, seed);
        case AttackKind::Fnn: return std::make_unique<FnnJammer>(p, rbs, seed);
    }
    return nullptr;
}

} // namespace jamslice

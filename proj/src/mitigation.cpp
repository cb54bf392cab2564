#include "jamslice/mitigation.hpp"

#include "jamslice/dtrl.hpp"
#include "jamslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace jamslice {

DefenderState defender_state(std::span<const std::uint8_t> allocated, std::span<const std::uint8_t> observed_jam) {
    if (allocated.size() != observed_jam.size()) throw ConfigError("defender_state: bit-vector length mismatch");
    DefenderState s;
    s.allocated.assign(allocated.begin(), allocated.end());
    s.jammed.assign(observed_jam.begin(), observed_jam.end());
    s.vacant.resize(allocated.size());
    for (std::size_t r = 0; r < allocated.size(); ++r) s.vacant[r] = allocated[r] ? 0 : 1;
    return s;
}

double decoy_power_total(const DecoyPlan& plan) {
    double total = 0.0;
    for (double p : plan.power_mw) total += p;
    return total;
}

double avg_signal_power(std::span<const std::complex<double>> samples) {
    if (samples.empty()) throw DomainError("avg_signal_power: no samples");
    double s = 0.0;
    for (const auto& x : samples) s += std::norm(x);
    return s / static_cast<double>(samples.size());
}

double mitigation_reward(std::span<const double> allocated_sinr) {
    if (allocated_sinr.empty()) return 0.0;
    return std::accumulate(allocated_sinr.begin(), allocated_sinr.end(), 0.0) /
           static_cast<double>(allocated_sinr.size());
}

DecoyRegion decoy_region(int pattern, int rbs) {
    if (pattern < 1 || pattern >= kDecoyPatterns) throw LookupError("decoy_region: pattern has no region");
    const int region = (pattern - 1) / 2;
    const int half = (rbs + 1) / 2;  // lower half matches the jammer's split
    switch (region) {
        case 0: return {0, rbs};
        case 1: return {0, half};
        case 2: return {half, rbs};
        case 3: return {0, rbs / 3};
        case 4: return {rbs / 3, 2 * rbs / 3};
        default: return {2 * rbs / 3, rbs};
    }
}

std::vector<int> decoy_set(int pattern, std::span<const std::uint8_t> vacant) {
    if (pattern < 0 || pattern >= kDecoyPatterns) throw LookupError("decoy_set: pattern out of range");
    std::vector<int> out;
    if (pattern == 0) return out;
    const int rbs = static_cast<int>(vacant.size());
    const DecoyRegion reg = decoy_region(pattern, rbs);
    const bool alternate = (pattern - 1) % 2 == 1;
    int rank = 0;
    for (int r = reg.begin; r < reg.end; ++r) {
        if (!vacant[r]) continue;
        if (!alternate || rank % 2 == 0) out.push_back(r);
        ++rank;
    }
    return out;
}

DecoyPlan make_decoy_plan(int pattern, std::span<const std::uint8_t> vacant, double power_mw, int samples, Rng& rng) {
    if (samples < 1) throw ConfigError("decoy: signal sample count must be >= 1");
    DecoyPlan plan;
    plan.pattern = pattern;
    plan.rbs = decoy_set(pattern, vacant);
    const double amp = std::sqrt(power_mw);
    for (std::size_t i = 0; i < plan.rbs.size(); ++i) {
        std::vector<std::complex<double>> xi(samples);
        for (auto& x : xi) x = std::polar(amp, 2.0 * std::numbers::pi * uniform01(rng));
        plan.power_mw.push_back(avg_signal_power(xi));
        plan.samples.push_back(std::move(xi));
    }
    return plan;
}

// ---------------------------------------------------------------- Q defender

DecoyDefender::DecoyDefender(const DefenderParams& p, int rbs) : p_(p), rbs_(rbs), prior_(kDecoyPatterns, 0.0) {
    if (rbs > 32) throw ConfigError("decoy defender: at most 32 RBs are supported");
}

std::uint64_t DecoyDefender::key(const DefenderState& s) const {
    std::uint64_t k = 0;
    for (int r = 0; r < rbs_; ++r) {
        if (s.allocated[r]) k |= 1ULL << r;
        if (s.jammed[r]) k |= 1ULL << (32 + r);
    }
    return k;
}

std::vector<double> DecoyDefender::q_row(const DefenderState& s) const {
    const auto it = q_.find(key(s));
    return it == q_.end() ? prior_ : it->second;
}

DecoyPlan DecoyDefender::step(const DefenderState& s, std::optional<double> reward, double power_mw, Rng& rng) {
    const std::uint64_t k = key(s);
    auto [it, inserted] = q_.try_emplace(k, prior_);
    const double max_next = *std::max_element(it->second.begin(), it->second.end());
    if (prev_key_ && reward) {
        const double target = *reward + p_.gamma * max_next;
        double& q = q_.at(*prev_key_)[prev_action_];
        q = q + p_.chi * (target - q);
        double& g = prior_[prev_action_];
        g = g + p_.chi * (target - g);
    }
    const std::vector<double>& row = q_.at(k);
    const int a = epsilon_greedy(row, p_.epsilon, rng);
    prev_key_ = k;
    prev_action_ = a;
    return make_decoy_plan(a, s.vacant, power_mw, p_.signal_samples, rng);
}

// ---------------------------------------------------------------- FNN defender

FnnDefender::FnnDefender(const DefenderParams& p, int rbs, std::uint64_t seed)
    : p_(p), rbs_(rbs), net_({p.fnn_history * 2 * rbs, p.fnn_hidden, p.fnn_hidden, kDecoyPatterns}) {
    if (p.fnn_history < 1) throw ConfigError("fnn defender: history must be >= 1");
    Rng rng(seed);
    net_.init_uniform(rng, p.fnn_init_range);
}

std::optional<int> FnnDefender::label_for(std::span<const std::uint8_t> jammed, int rbs) {
    if (std::none_of(jammed.begin(), jammed.end(), [](std::uint8_t b) { return b != 0; })) return std::nullopt;
    int best = -1, best_score = -1, best_width = rbs + 1;
    for (int pattern = 1; pattern < kDecoyPatterns; pattern += 2) {
        const DecoyRegion reg = decoy_region(pattern, rbs);
        int score = 0;
        for (int r = reg.begin; r < reg.end; ++r) score += jammed[r] ? 1 : 0;
        const int width = reg.end - reg.begin;
        if (score > best_score || (score == best_score && width < best_width)) {
            best = pattern;
            best_score = score;
            best_width = width;
        }
    }
    return best;
}

Vec FnnDefender::input() const {
    Vec x;
    for (const auto& s : history_) {
        x.insert(x.end(), s.jammed.begin(), s.jammed.end());
        x.insert(x.end(), s.allocated.begin(), s.allocated.end());
    }
    return x;
}

std::optional<int> FnnDefender::predict() const {
    if (static_cast<int>(history_.size()) < p_.fnn_history) return std::nullopt;
    return argmax(net_.forward(input()));
}

DecoyPlan FnnDefender::step(const DefenderState& s, double power_mw, Rng& rng) {
    if (static_cast<int>(history_.size()) == p_.fnn_history) {
        if (const auto label = label_for(s.jammed, rbs_)) {
            Vec t(kDecoyPatterns, 0.0);
            t[*label] = 1.0;
            net_.train(input(), t, p_.fnn_learning_rate);
        }
        history_.pop_front();
    }
    history_.push_back(s);
    const int pattern = predict().value_or(0);
    return make_decoy_plan(pattern, s.vacant, power_mw, p_.signal_samples, rng);
}

// ---------------------------------------------------------------- suspend-learning

KnowledgeRepository build_knowledge_repo(const std::function<MonitorSample(std::uint64_t)>& runner,
                                         std::span<const std::uint64_t> seeds) {
    if (seeds.size() < 10) throw ConfigError("knowledge repository: at least 10 monitoring seeds required");
    std::vector<MonitorSample> runs;
    for (auto seed : seeds) runs.push_back(runner(seed));
    std::vector<double> rewards;
    for (const auto& m : runs) rewards.push_back(m.reward);
    std::vector<double> sorted = rewards;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(rewards[a] - median) < std::abs(rewards[b] - median);
    });
    KnowledgeRepository repo;
    for (std::size_t i = 0; i < 5; ++i) {
        repo.power_mw += runs[order[i]].power_mw / 5.0;
        repo.sinr += runs[order[i]].sinr / 5.0;
    }
    repo.built = true;
    return repo;
}

SuspendDecision suspend_learning_step(const KnowledgeRepository& repo, double observed_power_mw,
                                      double observed_sinr, double guard) {
    if (!repo.built) throw ConfigError("suspend-learning: knowledge repository has not been built");
    const bool power_up = observed_power_mw > repo.power_mw * (1.0 + guard);
    const bool sinr_down = observed_sinr < repo.sinr * (1.0 - guard);
    return power_up && sinr_down ? SuspendDecision::Suspend : SuspendDecision::Learn;
}

const char* to_string(MitigationKind k) {
    switch (k) {
        case MitigationKind::None: return "none";
        case MitigationKind::Suspend: return "suspend";
        case MitigationKind::DecoyDrl: return "decoy-drl";
        case MitigationKind::DecoyFnn: return "decoy-fnn";
    }
    return "?";
}

std::optional<MitigationKind> parse_mitigation(const std::string& s) {
    for (auto k : {MitigationKind::None, MitigationKind::Suspend, MitigationKind::DecoyDrl, MitigationKind::DecoyFnn})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

} // namespace jamslice

#pragma once

// Defenses: decoy transmissions on vacant RBs chosen by a Q-learner or a
// feedforward net, and the suspend-learning baseline that freezes the slicing
// agent when power and SINR both drift from a no-attack reference.

#include "jamslice/nn.hpp"
#include "jamslice/rng.hpp"

#include <complex>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace jamslice {

using Bits = std::vector<std::uint8_t>;

struct DefenderState {
    Bits jammed;
    Bits allocated;
    Bits vacant;
};

/// `observed_jam` is last TTI's measured interference map.
DefenderState defender_state(std::span<const std::uint8_t> allocated, std::span<const std::uint8_t> observed_jam);

struct DecoyPlan {
    std::vector<int> rbs;                                  // the set B, ascending
    std::vector<double> power_mw;                          // p_i, parallel to rbs
    std::vector<std::vector<std::complex<double>>> samples;  // xi[n] per decoy RB
    int pattern = 0;
};

/// sum of p_i over the decoy set.
double decoy_power_total(const DecoyPlan& plan);

/// (1/N) sum |xi[n]|^2.
double avg_signal_power(std::span<const std::complex<double>> samples);

/// Mean linear SINR over the allocated RBs; 0 when none.
double mitigation_reward(std::span<const double> allocated_sinr);

/// Decoy patterns over the vacant RBs. Pattern 0 is silence; patterns 1..12
/// pair a region (band, lower/upper half, lower/middle/upper third) with
/// either every vacant RB in it or every other one.
constexpr int kDecoyPatterns = 13;

struct DecoyRegion {
    int begin = 0;
    int end = 0;
};
DecoyRegion decoy_region(int pattern, int rbs);

/// Vacant RBs energized by `pattern`.
std::vector<int> decoy_set(int pattern, std::span<const std::uint8_t> vacant);

/// Builds the plan: each decoy RB carries `samples` constant-envelope
/// samples at `power_mw` with random phase; p_i is measured from them.
DecoyPlan make_decoy_plan(int pattern, std::span<const std::uint8_t> vacant, double power_mw, int samples, Rng& rng);

struct DefenderParams {
    double chi = 0.5;
    double gamma = 0.9;
    double epsilon = 0.1;
    int signal_samples = 16;
    int fnn_history = 4;
    int fnn_hidden = 60;
    double fnn_learning_rate = 0.1;
    double fnn_init_range = 4.0;
};

/// Q-learning decoy controller keyed on the (allocated, jammed) bit pair.
/// Rows for unseen states start from a state-independent per-pattern estimate
/// that every update also moves.
class DecoyDefender {
public:
    DecoyDefender(const DefenderParams& p, int rbs);

    /// Closes the previous transition with `reward` (if any) and picks a plan.
    DecoyPlan step(const DefenderState& s, std::optional<double> reward, double power_mw, Rng& rng);

    std::vector<double> q_row(const DefenderState& s) const;
    std::size_t known_states() const { return q_.size(); }
    void set_epsilon(double e) { p_.epsilon = e; }

private:
    std::uint64_t key(const DefenderState& s) const;

    DefenderParams p_;
    int rbs_;
    std::unordered_map<std::uint64_t, std::vector<double>> q_;
    std::vector<double> prior_;
    std::optional<std::uint64_t> prev_key_;
    int prev_action_ = 0;
};

/// Feedforward decoy controller over the last few defender states, trained to
/// put decoys in the region where the jammer was last seen.
class FnnDefender {
public:
    FnnDefender(const DefenderParams& p, int rbs, std::uint64_t seed);

    DecoyPlan step(const DefenderState& s, double power_mw, Rng& rng);

    /// Pattern whose region covers the most jammed RBs (smallest region on ties,
    /// every vacant RB); nullopt when nothing was jammed.
    static std::optional<int> label_for(std::span<const std::uint8_t> jammed, int rbs);

    const FeedForwardNet& net() const { return net_; }
    std::optional<int> predict() const;

private:
    Vec input() const;

    DefenderParams p_;
    int rbs_;
    FeedForwardNet net_;
    std::deque<DefenderState> history_;
};

struct KnowledgeRepository {
    double power_mw = 0.0;  // mean in-band received power on allocated RBs
    double sinr = 0.0;      // mean SINR on allocated RBs
    bool built = false;
};

/// One no-attack monitoring run's averages.
struct MonitorSample {
    double power_mw = 0.0;
    double sinr = 0.0;
    double reward = 0.0;
};

/// Runs `runner` on 10 or more seeds and averages the 5 runs whose mean reward
/// lies closest to the median reward.
KnowledgeRepository build_knowledge_repo(const std::function<MonitorSample(std::uint64_t)>& runner,
                                         std::span<const std::uint64_t> seeds);

enum class SuspendDecision : std::uint8_t { Learn, Suspend };

/// Flags an attack when power exceeds the reference by more than the guard
/// band and SINR falls short of it by more than the guard band.
SuspendDecision suspend_learning_step(const KnowledgeRepository& repo, double observed_power_mw,
                                      double observed_sinr, double guard = 0.05);

enum class MitigationKind : std::uint8_t { None, Suspend, DecoyDrl, DecoyFnn };

const char* to_string(MitigationKind k);
std::optional<MitigationKind> parse_mitigation(const std::string& s);

} // namespace jamslice

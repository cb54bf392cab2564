#pragma once

// Jammers aimed at one target gNB: constant (fixed subband, fixed power),
// random (random subset of the same subband), an adaptive deep-Q jammer that
// senses occupancy before striking, and a feedforward predictor that jams the
// RB it expects to be used next.

#include "jamslice/nn.hpp"
#include "jamslice/rng.hpp"

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jamslice {

/// |sum L|^2 / rb_count, L being legitimate per-RB SINRs (linear).
double cja_power(std::span<const double> l_values, int rb_count);

/// 10 log10(3.16228e-8 mW/MHz * b_q).
double t_max_dbm(double rb_bandwidth_mhz);

/// min(T_max + 10 dB, X_r).
double detection_threshold_dbm(double t_max_dbm, double x_r_dbm);

struct SensingParams {
    double tti_us = 142.9;
    double slot_us = 9.0;
    double idle_us = 4.0;
    double sample_us = 1.0;
};

int slots_per_tti(const SensingParams& p);

enum class SlotVerdict : std::uint8_t { Idle, Busy };

/// Idle iff the received power stays below e_theta for at least `idle_us` in
/// total. `trace_dbm` holds one reading every `sample_us`.
SlotVerdict sense_slot(std::span<const double> trace_dbm, double sample_us, double slot_us,
                       double e_theta_dbm, double idle_us = 4.0);

struct SensingReport {
    std::vector<std::vector<SlotVerdict>> slots;  // [rb][slot]
    std::vector<std::uint8_t> busy;               // majority verdict per RB
};

/// Senses one TTI. `rx_mw[r]` is the power received on RB r from every
/// emitter that is on for the whole TTI; `noise_mw` is the receiver floor.
SensingReport sense_tti(std::span<const double> rx_mw, double noise_mw, double e_theta_dbm,
                        const SensingParams& p);

/// Occupancy bits followed by the normalized remaining budget.
std::vector<double> drlja_state(const SensingReport& report, double budget_fraction);

/// -(w1 L + w2 E): larger when the victim SINR and the energy spent are lower.
double drlja_reward(double sinr_after, double energy_spent, double w1, double w2);

/// Running min-max scaler; maps into [0, 1], 0 while the range is empty.
class MinMaxNormalizer {
public:
    void observe(double x);
    double normalize(double x) const;

private:
    bool seen_ = false;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

/// Integer energy accounting. One unit is one RB jammed for one TTI at the
/// half-power tier, so spending is exact and initial == spent + remaining.
class EnergyLedger {
public:
    explicit EnergyLedger(std::int64_t initial_units = 0) : initial_(initial_units) {}

    std::int64_t initial() const { return initial_; }
    std::int64_t spent() const { return spent_; }
    std::int64_t remaining() const { return initial_ - spent_; }
    bool can_spend(std::int64_t units) const { return units <= remaining(); }
    void spend(std::int64_t units);
    void reset() { spent_ = 0; }

private:
    std::int64_t initial_;
    std::int64_t spent_ = 0;
};

enum class AttackKind : std::uint8_t { None, Cja, Rja, DrlJa, Fnn };

const char* to_string(AttackKind k);
std::optional<AttackKind> parse_attack(const std::string& s);

/// Per-RB jammer transmit power for one TTI.
struct JammerAction {
    std::vector<double> power_mw;  // indexed by RB, 0 where idle
    std::int64_t energy_units = 0;

    std::vector<int> jammed() const;
    double total_mw() const;
};

/// What a jammer perceives in one TTI before it strikes.
struct JamObservation {
    std::int64_t tti = 0;
    const SensingReport* sensing = nullptr;
    /// Legitimate per-RB SINR of the target's allocated RBs seen during
    /// monitoring (linear, 0 on idle RBs); used by the constant jammer.
    std::span<const double> rb_sinr;
};

/// Outcome of a TTI, fed back after SINRs are realized.
struct JamFeedback {
    double mean_sinr_db = 0.0;  // over the target's allocated RBs, with jamming
    bool victim_active = true;  // false when the target carried no data
    std::vector<std::uint8_t> occupancy;  // sensed occupancy of this TTI
};

struct JammerParams {
    double power_dbm = 46.0;      // full tier; half tier is 3 dB lower
    double max_power_dbm = 46.0;  // cap on the constant jammer's computed power
    int subband_rbs = 3;          // width of the constant jammer's subband
    int monitor_ttis = 10;
    int max_rbs = 6;              // RBs the adaptive jammer can hit per TTI
    std::int64_t budget_units = 20000;  // per phase
    double x_r_dbm = -52.0;
    double distance_m = 100.0;
    double omega1 = 0.8;
    double omega2 = 0.2;
    double gamma = 0.9;
    double epsilon = 0.1;
    int hidden = 20;
    int layers = 1;
    int sequence = 4;
    int replay = 500;
    int minibatch = 16;
    int train_interval = 1;
    int copy_interval = 100;
    double learning_rate = 0.01;
    double grad_clip = 1.0;
    double init_range = 0.1;
    int fnn_history = 10;
    int fnn_hidden = 50;
    double fnn_learning_rate = 0.1;
    double fnn_init_range = 1.0;
};

class Jammer {
public:
    virtual ~Jammer() = default;
    virtual AttackKind kind() const = 0;
    virtual JammerAction act(const JamObservation& obs, Rng& rng) = 0;
    virtual void feedback(const JamFeedback&) {}
    virtual const EnergyLedger* ledger() const { return nullptr; }
    /// Called at a phase boundary.
    virtual void reset_budget() {}
};

/// Monitors for `monitor_ttis`, then jams its subband at a constant power
/// forever. The subband is the contiguous window that carried the most
/// allocated RBs while monitoring.
class ConstantJammer : public Jammer {
public:
    ConstantJammer(const JammerParams& p, int rbs);

    AttackKind kind() const override { return AttackKind::Cja; }
    JammerAction act(const JamObservation& obs, Rng& rng) override;

    bool armed() const { return armed_; }
    int subband_start() const { return start_; }
    double power_mw() const { return power_mw_; }

protected:
    bool monitor(const JamObservation& obs);

    JammerParams p_;
    int rbs_;
    int seen_ = 0;
    std::vector<double> busy_count_;
    std::vector<double> sinr_sum_;
    bool armed_ = false;
    int start_ = 0;
    double power_mw_ = 0.0;
};

/// Same monitoring and power as the constant jammer; each TTI it jams a
/// subset of the subband whose size is uniform on {0..width}.
class RandomJammer : public ConstantJammer {
public:
    RandomJammer(const JammerParams& p, int rbs) : ConstantJammer(p, rbs) {}

    AttackKind kind() const override { return AttackKind::Rja; }
    JammerAction act(const JamObservation& obs, Rng& rng) override;
};

/// Jam patterns over the RBs sensed busy. Pattern 0 is silence; the other 12
/// combine a region (whole band, lower half, upper half), a count (max_rbs or
/// half of it) and a tier (full or half power). Within the region the RBs are
/// drawn uniformly from those sensed busy.
struct JamPattern {
    int region = 0;  // 0 all, 1 lower half, 2 upper half
    bool half_count = false;
    bool half_power = false;
    bool silent = true;
};

constexpr int kJamPatterns = 13;
JamPattern jam_pattern(int index);

/// Realizes a pattern against a sensed occupancy. Never hits an RB sensed idle.
JammerAction apply_jam_pattern(int index, std::span<const std::uint8_t> busy, const JammerParams& p,
                               const EnergyLedger& ledger, Rng& rng);

/// Deep-Q jammer: an LSTM over the recent sensed states scores the 13 patterns.
class DrlJammer : public Jammer {
public:
    DrlJammer(const JammerParams& p, int rbs, std::uint64_t seed);

    AttackKind kind() const override { return AttackKind::DrlJa; }
    JammerAction act(const JamObservation& obs, Rng& rng) override;
    void feedback(const JamFeedback& fb) override;
    const EnergyLedger* ledger() const override { return &ledger_; }
    void reset_budget() override { ledger_.reset(); }

    const LstmNet& net() const { return online_; }
    int last_pattern() const { return last_pattern_; }
    void set_epsilon(double e) { p_.epsilon = e; }

private:
    struct Transition {
        Sequence s;
        int a = 0;
        double r = 0.0;
        Sequence s1;
    };
    void train(Rng& rng);

    JammerParams p_;
    int rbs_;
    EnergyLedger ledger_;
    LstmNet online_;
    LstmNet target_;
    std::deque<Vec> history_;
    std::optional<Transition> pending_;
    std::deque<Transition> replay_;
    MinMaxNormalizer sinr_norm_;
    MinMaxNormalizer energy_norm_;
    std::int64_t last_units_ = 0;
    int last_pattern_ = 0;
    std::int64_t steps_ = 0;
};

/// Feedforward predictor: from the last `fnn_history` sensed occupancy
/// vectors it picks the single RB most likely to be used next and jams it at
/// full power. Trained online with cross-entropy on each new occupancy.
class FnnJammer : public Jammer {
public:
    FnnJammer(const JammerParams& p, int rbs, std::uint64_t seed);

    AttackKind kind() const override { return AttackKind::Fnn; }
    JammerAction act(const JamObservation& obs, Rng& rng) override;
    void feedback(const JamFeedback& fb) override;
    const EnergyLedger* ledger() const override { return &ledger_; }
    void reset_budget() override { ledger_.reset(); }

    /// nullopt until `fnn_history` occupancy vectors have been observed.
    std::optional<int> predict() const;
    const FeedForwardNet& net() const { return net_; }
    /// Adds one occupancy vector to the history, training on it first.
    void observe(std::span<const std::uint8_t> occupancy);

private:
    Vec input() const;

    JammerParams p_;
    int rbs_;
    EnergyLedger ledger_;
    FeedForwardNet net_;
    std::deque<std::vector<std::uint8_t>> history_;
};

std::unique_ptr<Jammer> make_jammer(AttackKind kind, const JammerParams& p, int rbs, std::uint64_t seed);

} // namespace jamslice

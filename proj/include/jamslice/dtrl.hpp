#pragma once

// Slicing agents: tabular Q-learning with an optional LSTM Q-predictor,
// experience replay, target-network copies, and expert-to-learner transfer.

#include "jamslice/mdp.hpp"
#include "jamslice/nn.hpp"
#include "jamslice/rng.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace jamslice {

struct QLearningParams {
    double alpha = 0.5;
    double gamma = 0.9;
    double epsilon = 0.1;
};

/// (1 - alpha) q_old + alpha (r + gamma max_next).
double q_update_expert(double q_old, double reward, double max_next, double alpha, double gamma);

/// q_mapped + q_old + alpha (r + gamma max_next - q_old).
double q_update_learner(double q_mapped, double q_old, double reward, double max_next, double alpha,
                        double gamma);

/// Argmax with probability 1 - epsilon (lowest index on ties), otherwise a uniform action.
int epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng);

int argmax(std::span<const double> values);

/// Synchronous tabular Q-learning on a known MDP: each sweep draws one
/// transition per (s, a) and applies q_update_expert with alpha = 1/(k+1).
/// Returns Q flattened [s][a].
std::vector<double> q_learning_sweeps(const FiniteMdp& mdp, double gamma, std::int64_t sweeps, Rng& rng);

struct QueueState {
    int embb = 0;
    int urllc = 0;
    bool operator==(const QueueState&) const = default;
};

/// Scalar LSTM input in [0, 1]: (q_e (Q_max + 1) + q_u) / ((Q_max + 1)^2 - 1).
double encode_state(QueueState s, int queue_cap);
int state_index(QueueState s, int queue_cap);

struct Experience {
    QueueState s;
    int a = 0;
    double r = 0.0;
    QueueState s1;
    std::vector<double> history;       // encoded states ending at s
    std::vector<double> next_history;  // encoded states ending at s1
};

/// Fixed-capacity ring of the most recent experiences.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Experience e);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    /// Oldest first.
    const Experience& at(std::size_t i) const { return items_.at(i); }
    /// Uniform draw without replacement; n <= size().
    std::vector<const Experience*> sample(std::size_t n, Rng& rng) const;

private:
    std::size_t capacity_;
    std::deque<Experience> items_;
};

/// Radio split of one action; compute shares are zero for an agent without edge compute.
struct SliceAction {
    int index = 0;
    int rb_embb = 0;
    int rb_urllc = 0;
    double cpu_embb_hz = 0.0;
    double cpu_urllc_hz = 0.0;
};

/// Enumerated feasible actions. Action i gives uRLLC i+1 RBs and eMBB the rest;
/// with edge compute the uRLLC CPU share tracks its RB share, clamped to [1/4, 3/4].
class ActionSpace {
public:
    ActionSpace(int rbs, double compute_hz, bool edge_compute);

    int size() const { return static_cast<int>(actions_.size()); }
    const SliceAction& at(int i) const { return actions_.at(i); }
    bool edge_compute() const { return edge_; }

private:
    std::vector<SliceAction> actions_;
    bool edge_;
};

/// Dense (state, action) table with per-entry visit flags.
class QTable {
public:
    QTable() = default;
    QTable(int states, int actions);

    int states() const { return states_; }
    int actions() const { return actions_; }
    double value(int s, int a) const { return q_[idx(s, a)]; }
    bool visited(int s, int a) const { return seen_[idx(s, a)] != 0; }
    bool any_visited(int s) const;
    void set(int s, int a, double v);

    std::vector<NamedTensor> tensors();
    bool operator==(const QTable&) const = default;

private:
    std::size_t idx(int s, int a) const;
    int states_ = 0;
    int actions_ = 0;
    std::vector<double> q_;
    std::vector<double> seen_;
};

/// Learner-to-expert mapping. Both agents observe the same queue state, so F is
/// the identity; F' drops the compute components of a learner action.
struct TransferMap {
    std::shared_ptr<const QTable> expert_q;

    QueueState map_state(QueueState s) const { return s; }
    SliceAction map_action(const SliceAction& a) const;
    /// Q^T(F(s), F'(a)); 0 without an expert snapshot or for unvisited entries.
    double prior(int state, int learner_action) const;
};

enum class QMode : std::uint8_t { Table, Lstm };

struct LstmAgentParams {
    int hidden = 20;
    int layers = 1;
    int sequence = 4;
    int replay = 60;
    int minibatch = 20;
    int train_interval = 60;
    int train_iterations = 10;
    int copy_interval = 120;
    double learning_rate = 0.01;
    double grad_clip = 1.0;
    double init_range = 0.1;
};

struct AgentConfig {
    QMode mode = QMode::Lstm;
    QLearningParams q;
    LstmAgentParams lstm;
    int queue_cap = 100;
    int rbs = 13;
    double compute_hz = 1e9;
    bool edge_compute = false;  // learner-side MEC
};

/// One slicing agent. Each call to step() closes the previous transition with
/// the reward it earned, learns from it, and picks the next action.
class SlicingAgent {
public:
    SlicingAgent(const AgentConfig& cfg, std::uint64_t seed);

    /// Installs an expert snapshot as transfer prior and copies its network.
    void attach_transfer(std::shared_ptr<const QTable> expert_q, const LstmNet* expert_net);

    const SliceAction& step(QueueState s, double reward, Rng& rng);
    /// Learning suspended: no update, no replay write; the previous action is repeated.
    const SliceAction& step_frozen(QueueState s);

    /// Greedy Q-row the agent would act on in state s (table entries, transfer
    /// prior, then LSTM prediction for unvisited entries).
    std::vector<double> q_row(QueueState s, std::span<const double> history) const;

    const QTable& table() const { return table_; }
    std::shared_ptr<const QTable> snapshot() const { return std::make_shared<QTable>(table_); }
    const LstmNet& online() const { return online_; }
    const LstmNet& target() const { return target_; }
    const ReplayBuffer& replay() const { return replay_; }
    const ActionSpace& actions() const { return actions_; }
    const AgentConfig& config() const { return cfg_; }
    std::int64_t steps() const { return steps_; }
    std::int64_t copies() const { return copies_; }
    double last_loss() const { return last_loss_; }

    /// Mean squared TD loss over a minibatch; the online net takes one SGD step.
    /// Returns nullopt when the replay holds fewer than `minibatch` experiences.
    std::optional<double> train_minibatch(Rng& rng);

    void save(std::ostream& os);
    void load(std::istream& is);

private:
    AgentConfig cfg_;
    ActionSpace actions_;
    QTable table_;
    TransferMap transfer_;
    LstmNet online_;
    LstmNet target_;
    ReplayBuffer replay_;
    std::deque<double> history_;
    std::optional<QueueState> prev_state_;
    std::vector<double> prev_history_;
    int prev_action_ = 0;
    std::int64_t steps_ = 0;
    std::int64_t copies_ = 0;
    double last_loss_ = 0.0;
};

} // namespace jamslice

#include "jamslice/dtrl.hpp"

#include "jamslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

namespace jamslice {

double q_update_expert(double q_old, double reward, double max_next, double alpha, double gamma) {
    return (1.0 - alpha) * q_old + alpha * (reward + gamma * max_next);
}

double q_update_learner(double q_mapped, double q_old, double reward, double max_next, double alpha,
                        double gamma) {
    return q_mapped + q_old + alpha * (reward + gamma * max_next - q_old);
}

int argmax(std::span<const double> values) {
    if (values.empty()) throw DomainError("argmax: empty value set");
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

int epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng) {
    if (q_values.empty()) throw DomainError("epsilon_greedy: empty action set");
    if (epsilon < 0.0 || epsilon > 1.0) throw DomainError("epsilon_greedy: epsilon must lie in [0, 1]");
    // Always consume the same number of draws so seeds stay aligned across policies.
    const double u = uniform01(rng);
    const int pick = std::uniform_int_distribution<int>(0, static_cast<int>(q_values.size()) - 1)(rng);
    return u < epsilon ? pick : argmax(q_values);
}

std::vector<double> q_learning_sweeps(const FiniteMdp& mdp, double gamma, std::int64_t sweeps, Rng& rng) {
    if (gamma < 0.0 || gamma >= 1.0) throw DomainError("q_learning_sweeps: gamma must lie in [0, 1)");
    const int S = mdp.states, A = mdp.actions;
    std::vector<double> q(static_cast<std::size_t>(S) * A, 0.0);
    for (std::int64_t k = 0; k < sweeps; ++k) {
        const double alpha = 1.0 / static_cast<double>(k + 1);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const int s1 = mdp.next_state(s, a, rng);
                const auto row = std::span<const double>(q).subspan(static_cast<std::size_t>(s1) * A, A);
                const double m = *std::max_element(row.begin(), row.end());
                double& x = q[static_cast<std::size_t>(s) * A + a];
                x = q_update_expert(x, mdp.reward(s, a), m, alpha, gamma);
            }
    }
    return q;
}

double encode_state(QueueState s, int queue_cap) {
    const double side = queue_cap + 1.0;
    return (s.embb * side + s.urllc) / (side * side - 1.0);
}

int state_index(QueueState s, int queue_cap) {
    if (s.embb < 0 || s.urllc < 0 || s.embb > queue_cap || s.urllc > queue_cap)
        throw DomainError("state_index: queue length outside [0, cap]");
    return s.embb * (queue_cap + 1) + s.urllc;
}

// ---------------------------------------------------------------- replay

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay: capacity must be >= 1");
}

void ReplayBuffer::push(Experience e) {
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(e));
}

std::vector<const Experience*> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
    if (n > items_.size()) throw DomainError("replay: sample larger than buffer");
    std::vector<std::size_t> idx(items_.size());
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + std::uniform_int_distribution<std::size_t>(0, idx.size() - 1 - i)(rng);
        std::swap(idx[i], idx[j]);
    }
    std::vector<const Experience*> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = &items_[idx[i]];
    return out;
}

// ---------------------------------------------------------------- actions

ActionSpace::ActionSpace(int rbs, double compute_hz, bool edge_compute) : edge_(edge_compute) {
    if (rbs < 1) throw ConfigError("actions: rbs must be >= 1");
    for (int i = 0; i < rbs; ++i) {
        SliceAction a;
        a.index = i;
        a.rb_urllc = i + 1;
        a.rb_embb = rbs - a.rb_urllc;
        if (edge_compute) {
            const double share = std::clamp(static_cast<double>(a.rb_urllc) / rbs, 0.25, 0.75);
            a.cpu_urllc_hz = compute_hz * share;
            a.cpu_embb_hz = compute_hz - a.cpu_urllc_hz;
        }
        actions_.push_back(a);
    }
}

SliceAction TransferMap::map_action(const SliceAction& a) const {
    SliceAction e = a;
    e.cpu_embb_hz = 0.0;
    e.cpu_urllc_hz = 0.0;
    return e;
}

double TransferMap::prior(int state, int learner_action) const {
    if (!expert_q) return 0.0;
    // Expert and learner enumerate radio splits in the same order, so the
    // projected action keeps its index.
    const int a = learner_action;
    if (state >= expert_q->states() || a >= expert_q->actions()) return 0.0;
    return expert_q->visited(state, a) ? expert_q->value(state, a) : 0.0;
}

// ---------------------------------------------------------------- table

QTable::QTable(int states, int actions)
    : states_(states), actions_(actions),
      q_(static_cast<std::size_t>(states) * actions, 0.0),
      seen_(static_cast<std::size_t>(states) * actions, 0.0) {}

std::size_t QTable::idx(int s, int a) const {
    if (s < 0 || s >= states_ || a < 0 || a >= actions_) throw LookupError("qtable: index out of range");
    return static_cast<std::size_t>(s) * actions_ + a;
}

bool QTable::any_visited(int s) const {
    for (int a = 0; a < actions_; ++a)
        if (visited(s, a)) return true;
    return false;
}

void QTable::set(int s, int a, double v) {
    q_[idx(s, a)] = v;
    seen_[idx(s, a)] = 1.0;
}

std::vector<NamedTensor> QTable::tensors() {
    return {{"qtable.values", {states_, actions_}, q_}, {"qtable.visited", {states_, actions_}, seen_}};
}

// ---------------------------------------------------------------- agent

SlicingAgent::SlicingAgent(const AgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      actions_(cfg.rbs, cfg.compute_hz, cfg.edge_compute),
      table_((cfg.queue_cap + 1) * (cfg.queue_cap + 1), cfg.rbs),
      replay_(static_cast<std::size_t>(std::max(1, cfg.lstm.replay))) {
    if (cfg.q.alpha < 0.0 || cfg.q.alpha > 1.0) throw ConfigError("agent: alpha must lie in [0, 1]");
    if (cfg.lstm.sequence < 1) throw ConfigError("agent: LSTM sequence length must be >= 1");
    if (cfg_.mode == QMode::Lstm) {
        online_ = LstmNet({1, cfg.lstm.hidden, cfg.lstm.layers, cfg.rbs});
        Rng rng(seed);
        online_.init_uniform(rng, cfg.lstm.init_range);
        target_ = online_;
    }
}

void SlicingAgent::attach_transfer(std::shared_ptr<const QTable> expert_q, const LstmNet* expert_net) {
    transfer_.expert_q = std::move(expert_q);
    if (expert_net && cfg_.mode == QMode::Lstm && expert_net->shape() == online_.shape()) {
        online_ = *expert_net;
        target_ = online_;
    }
}

std::vector<double> SlicingAgent::q_row(QueueState s, std::span<const double> history) const {
    const int si = state_index(s, cfg_.queue_cap);
    const int A = actions_.size();
    std::vector<double> row(A, 0.0);
    Vec predicted;
    for (int a = 0; a < A; ++a) {
        if (table_.visited(si, a)) {
            row[a] = table_.value(si, a);
        } else if (transfer_.expert_q && transfer_.expert_q->visited(si, a)) {
            row[a] = transfer_.prior(si, a);
        } else if (cfg_.mode == QMode::Lstm && !history.empty()) {
            if (predicted.empty()) {
                Sequence seq;
                for (double x : history) seq.push_back({x});
                predicted = online_.forward(seq);
            }
            row[a] = predicted[a];
        }
    }
    return row;
}

std::optional<double> SlicingAgent::train_minibatch(Rng& rng) {
    const auto B = static_cast<std::size_t>(cfg_.lstm.minibatch);
    if (cfg_.mode != QMode::Lstm || replay_.size() < B || B == 0) return std::nullopt;
    const auto batch = replay_.sample(B, rng);
    Vec grad(online_.param_count(), 0.0);
    std::vector<double> target(cfg_.rbs, 0.0), weights(cfg_.rbs, 0.0);
    double loss = 0.0;
    for (const Experience* e : batch) {
        Sequence next, cur;
        for (double x : e->next_history) next.push_back({x});
        for (double x : e->history) cur.push_back({x});
        const Vec qn = target_.forward(next);
        const double t = e->r + cfg_.q.gamma * *std::max_element(qn.begin(), qn.end());
        std::fill(weights.begin(), weights.end(), 0.0);
        weights[e->a] = 2.0 / static_cast<double>(B);
        target[e->a] = t;
        const Vec y = online_.accumulate_gradient(cur, target, weights, grad);
        loss += (y[e->a] - t) * (y[e->a] - t);
    }
    loss /= static_cast<double>(B);
    sgd_step(online_.params(), grad, cfg_.lstm.learning_rate, cfg_.lstm.grad_clip);
    last_loss_ = loss;
    return loss;
}

const SliceAction& SlicingAgent::step(QueueState s, double reward, Rng& rng) {
    history_.push_back(encode_state(s, cfg_.queue_cap));
    while (static_cast<int>(history_.size()) > cfg_.lstm.sequence) history_.pop_front();
    std::vector<double> hist(history_.begin(), history_.end());

    std::vector<double> row = q_row(s, hist);
    if (prev_state_) {
        const int ps = state_index(*prev_state_, cfg_.queue_cap);
        const int a = prev_action_;
        const double m = *std::max_element(row.begin(), row.end());
        double updated;
        if (transfer_.expert_q && !table_.visited(ps, a)) {
            updated = q_update_learner(transfer_.prior(ps, a), 0.0, reward, m, cfg_.q.alpha, cfg_.q.gamma);
        } else {
            const double q_old = table_.value(ps, a);
            updated = q_update_expert(q_old, reward, m, cfg_.q.alpha, cfg_.q.gamma);
        }
        table_.set(ps, a, updated);
        if (*prev_state_ == s) row[a] = updated;
        replay_.push({*prev_state_, a, reward, s, prev_history_, hist});
    }
    ++steps_;
    if (cfg_.mode == QMode::Lstm) {
        if (cfg_.lstm.train_interval > 0 && steps_ % cfg_.lstm.train_interval == 0)
            for (int i = 0; i < cfg_.lstm.train_iterations; ++i) train_minibatch(rng);
        if (cfg_.lstm.copy_interval > 0 && steps_ % cfg_.lstm.copy_interval == 0) {
            target_ = online_;
            ++copies_;
        }
    }
    const int a = epsilon_greedy(row, cfg_.q.epsilon, rng);
    prev_state_ = s;
    prev_history_ = std::move(hist);
    prev_action_ = a;
    return actions_.at(a);
}

const SliceAction& SlicingAgent::step_frozen(QueueState s) {
    history_.push_back(encode_state(s, cfg_.queue_cap));
    while (static_cast<int>(history_.size()) > cfg_.lstm.sequence) history_.pop_front();
    // The transition that ended here is discarded; learning resumes from s.
    prev_state_ = s;
    prev_history_.assign(history_.begin(), history_.end());
    ++steps_;
    return actions_.at(prev_action_);
}

void SlicingAgent::save(std::ostream& os) {
    auto t = table_.tensors();
    if (cfg_.mode == QMode::Lstm) {
        for (auto& x : online_.tensors()) t.push_back({"online." + x.name, x.shape, x.data});
        for (auto& x : target_.tensors()) t.push_back({"target." + x.name, x.shape, x.data});
    }
    write_tensors(os, t);
}

void SlicingAgent::load(std::istream& is) {
    auto t = table_.tensors();
    if (cfg_.mode == QMode::Lstm) {
        for (auto& x : online_.tensors()) t.push_back({"online." + x.name, x.shape, x.data});
        for (auto& x : target_.tensors()) t.push_back({"target." + x.name, x.shape, x.data});
    }
    read_tensors(is, t);
}

} // namespace jamslice

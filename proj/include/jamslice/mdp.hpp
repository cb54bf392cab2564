#pragma once

// Small finite MDPs used as exact oracles for the learning code.

#include "jamslice/rng.hpp"

#include <vector>

namespace jamslice {

/// Explicit transition probabilities and expected rewards.
struct FiniteMdp {
    int states = 0;
    int actions = 0;
    std::vector<double> p;  // [s][a][s']
    std::vector<double> r;  // [s][a]

    FiniteMdp() = default;
    FiniteMdp(int s, int a)
        : states(s), actions(a), p(static_cast<std::size_t>(s) * a * s, 0.0), r(static_cast<std::size_t>(s) * a, 0.0) {}

    double& prob(int s, int a, int s1) { return p[(static_cast<std::size_t>(s) * actions + a) * states + s1]; }
    double prob(int s, int a, int s1) const { return p[(static_cast<std::size_t>(s) * actions + a) * states + s1]; }
    double& reward(int s, int a) { return r[static_cast<std::size_t>(s) * actions + a]; }
    double reward(int s, int a) const { return r[static_cast<std::size_t>(s) * actions + a]; }

    /// Random MDP with dense transitions and rewards in [-1, 1].
    static FiniteMdp random(int states, int actions, Rng& rng);

    /// Samples s' ~ P(. | s, a).
    int next_state(int s, int a, Rng& rng) const;
};

/// policy[s][a] is the probability of taking a in s.
using StochasticPolicy = std::vector<std::vector<double>>;

/// Exact Q^pi(s, a) = r(s,a) + gamma sum_s' P(s'|s,a) sum_a' pi(a'|s') Q^pi(s',a'),
/// by solving the linear system. Flattened [s][a].
std::vector<double> policy_value(const FiniteMdp& mdp, const StochasticPolicy& policy, double gamma);

/// Q* by value iteration; flattened [s][a].
std::vector<double> value_iteration(const FiniteMdp& mdp, double gamma, double tol = 1e-13);

} // namespace jamslice

#include "jamslice/mdp.hpp"

#include "jamslice/errors.hpp"

#include <algorithm>
#include <cmath>

namespace jamslice {

FiniteMdp FiniteMdp::random(int states, int actions, Rng& rng) {
    FiniteMdp m(states, actions);
    for (int s = 0; s < states; ++s) {
        for (int a = 0; a < actions; ++a) {
            double total = 0.0;
            for (int s1 = 0; s1 < states; ++s1) {
                m.prob(s, a, s1) = 0.05 + uniform01(rng);
                total += m.prob(s, a, s1);
            }
            for (int s1 = 0; s1 < states; ++s1) m.prob(s, a, s1) /= total;
            m.reward(s, a) = 2.0 * uniform01(rng) - 1.0;
        }
    }
    return m;
}

int FiniteMdp::next_state(int s, int a, Rng& rng) const {
    double u = uniform01(rng);
    for (int s1 = 0; s1 < states; ++s1) {
        u -= prob(s, a, s1);
        if (u < 0.0) return s1;
    }
    return states - 1;
}

std::vector<double> policy_value(const FiniteMdp& mdp, const StochasticPolicy& policy, double gamma) {
    if (gamma < 0.0 || gamma >= 1.0) throw DomainError("policy_value: gamma must lie in [0, 1)");
    if (static_cast<int>(policy.size()) != mdp.states) throw ConfigError("policy_value: policy size mismatch");
    const int S = mdp.states, A = mdp.actions, n = S * A;
    // (I - gamma P_pi) q = r, with P_pi[(s,a),(s',a')] = P(s'|s,a) pi(a'|s').
    std::vector<double> m(static_cast<std::size_t>(n) * (n + 1), 0.0);
    auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * (n + 1) + j]; };
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            const int i = s * A + a;
            at(i, i) += 1.0;
            for (int s1 = 0; s1 < S; ++s1)
                for (int a1 = 0; a1 < A; ++a1) at(i, s1 * A + a1) -= gamma * mdp.prob(s, a, s1) * policy[s1][a1];
            at(i, n) = mdp.reward(s, a);
        }
    }
    // Gaussian elimination with partial pivoting; the system is diagonally dominant for gamma < 1.
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int i = c + 1; i < n; ++i)
            if (std::abs(at(i, c)) > std::abs(at(piv, c))) piv = i;
        if (piv != c)
            for (int j = 0; j <= n; ++j) std::swap(at(c, j), at(piv, j));
        for (int i = 0; i < n; ++i) {
            if (i == c) continue;
            const double f = at(i, c) / at(c, c);
            if (f == 0.0) continue;
            for (int j = c; j <= n; ++j) at(i, j) -= f * at(c, j);
        }
    }
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = at(i, n) / at(i, i);
    return q;
}

std::vector<double> value_iteration(const FiniteMdp& mdp, double gamma, double tol) {
    if (gamma < 0.0 || gamma >= 1.0) throw DomainError("value_iteration: gamma must lie in [0, 1)");
    const int S = mdp.states, A = mdp.actions;
    std::vector<double> q(static_cast<std::size_t>(S) * A, 0.0), next(q.size());
    std::vector<double> v(S, 0.0);
    for (int iter = 0; iter < 100000; ++iter) {
        for (int s = 0; s < S; ++s) v[s] = *std::max_element(q.begin() + s * A, q.begin() + (s + 1) * A);
        double delta = 0.0;
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < A; ++a) {
                double e = mdp.reward(s, a);
                for (int s1 = 0; s1 < S; ++s1) e += gamma * mdp.prob(s, a, s1) * v[s1];
                delta = std::max(delta, std::abs(e - q[s * A + a]));
                next[s * A + a] = e;
            }
        }
        q.swap(next);
        if (delta < tol) break;
    }
    return q;
}

} // namespace jamslice

#include "jamslice/dtrl.hpp"
#include "jamslice/errors.hpp"
#include "jamslice/mdp.hpp"
#include "jamslice/nn.hpp"
#include "jamslice/traffic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace jamslice;

namespace {

double lstm_loss(const LstmNet& net, const Sequence& seq, const Vec& t, const Vec& w) {
    const Vec y = net.forward(seq);
    double l = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) l += 0.5 * w[k] * (y[k] - t[k]) * (y[k] - t[k]);
    return l;
}

double rel_err(double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8}); }

} // namespace

// ---------------------------------------------------------------- traffic

TEST_CASE("traffic arrivals") {
    TrafficParams p;
    p.embb_load_mbps = 0.0;
    p.urllc_load_mbps = 0.0;
    TrafficGenerator silent(p, 1e-3);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(silent.next(rng) == Arrivals{});

    // 4 packets per TTI of 100-byte eMBB packets at 1 ms TTIs is 3.2 Mbps.
    p.embb_load_mbps = 3.2;
    TrafficGenerator g(p, 1e-3);
    CHECK(g.embb_rate() == doctest::Approx(4.0));
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += g.next(rng).embb;
    CHECK(sum / n == doctest::Approx(4.0).epsilon(0.05 / 4.0));

    TrafficParams cbr;
    cbr.embb_load_mbps = 0.0;
    cbr.urllc_load_mbps = 0.8;  // 2 packets of 50 B per ms
    cbr.urllc_cbr_fraction = 1.0;
    TrafficGenerator c(cbr, 1e-3);
    for (int i = 0; i < 50; ++i) CHECK(c.next(rng).urllc == 2);
}

TEST_CASE("slice queue refuses beyond capacity") {
    SliceQueue q(Slice::Urllc, 2);
    CHECK(q.push(Packet{}));
    CHECK(q.push(Packet{}));
    CHECK_FALSE(q.push(Packet{}));
    CHECK(q.overflow_drops() == 1);
    CHECK(q.size() == 2);
}

// ---------------------------------------------------------------- Q-learning

TEST_CASE("Q updates") {
    CHECK(q_update_expert(0, 1, 0, 0.5, 0.9) == doctest::Approx(0.5));
    CHECK(q_update_expert(1, 0, 1, 0.5, 0.9) == doctest::Approx(0.95));
    CHECK(q_update_expert(0.3, 5, 2, 0.0, 0.9) == 0.3);
    CHECK(q_update_learner(0, 0, 1, 0, 0.5, 0.9) == doctest::Approx(0.5));
    CHECK(q_update_learner(2, 0, 1, 0, 0.5, 0.9) == doctest::Approx(2.5));
    CHECK(q_update_learner(0, 0.7, 4, 1, 0.0, 0.9) == 0.7);
}

TEST_CASE("epsilon greedy") {
    Rng rng(5);
    const std::vector<double> a{1, 3, 2}, b{2, 2, 1};
    CHECK(epsilon_greedy(a, 0.0, rng) == 1);
    CHECK(epsilon_greedy(b, 0.0, rng) == 0);
    std::vector<int> counts(3, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[epsilon_greedy(a, 1.0, rng)];
    for (int c : counts) CHECK(static_cast<double>(c) / n == doctest::Approx(1.0 / 3).epsilon(0.03));
    CHECK_THROWS_AS(epsilon_greedy(a, 1.5, rng), DomainError);
}

TEST_CASE("tabular Q-learning reaches the value iteration fixed point") {
    Rng rng(11);
    const FiniteMdp mdp = FiniteMdp::random(4, 3, rng);
    const double gamma = 0.5;
    const auto qstar = value_iteration(mdp, gamma);
    const auto q = q_learning_sweeps(mdp, gamma, 4'000'000, rng);
    double err = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) err = std::max(err, std::abs(q[i] - qstar[i]));
    CHECK(err < 1e-3);
}

TEST_CASE("state encoding") {
    CHECK(encode_state({0, 0}, 100) == 0.0);
    CHECK(encode_state({100, 100}, 100) == doctest::Approx(1.0));
    CHECK(state_index({3, 2}, 100) == 3 * 101 + 2);
    CHECK_THROWS_AS(state_index({101, 0}, 100), DomainError);
}

TEST_CASE("replay buffer keeps the most recent experiences") {
    ReplayBuffer r(3);
    for (int i = 0; i < 5; ++i) r.push(Experience{{i, 0}, i, 0.0, {}, {}, {}});
    CHECK(r.size() == 3);
    CHECK(r.at(0).a == 2);
    Rng rng(1);
    const auto s = r.sample(3, rng);
    std::vector<int> seen;
    for (auto* e : s) seen.push_back(e->a);
    std::sort(seen.begin(), seen.end());
    CHECK(seen == std::vector<int>{2, 3, 4});
    CHECK_THROWS_AS(r.sample(4, rng), DomainError);
}

TEST_CASE("transfer mapping") {
    TransferMap f;
    CHECK(f.map_state({3, 2}) == QueueState{3, 2});
    const SliceAction a{4, 5, 8, 1e8, 2e8};
    const SliceAction e = f.map_action(a);
    CHECK(e.rb_embb == 5);
    CHECK(e.rb_urllc == 8);
    CHECK(e.cpu_embb_hz == 0.0);
    auto q = std::make_shared<QTable>(10, 13);
    q->set(7, 4, 1.7);
    f.expert_q = q;
    CHECK(f.prior(7, 4) == 1.7);
    CHECK(f.prior(7, 5) == 0.0);
}

TEST_CASE("action space splits the band") {
    const ActionSpace s(13, 1e9, true);
    REQUIRE(s.size() == 13);
    for (int i = 0; i < s.size(); ++i) {
        CHECK(s.at(i).rb_urllc + s.at(i).rb_embb == 13);
        CHECK(s.at(i).cpu_urllc_hz + s.at(i).cpu_embb_hz == doctest::Approx(1e9));
    }
}

TEST_CASE("agent steps, target copies and determinism") {
    AgentConfig cfg;
    SlicingAgent a(cfg, 17), b(cfg, 17);
    Rng ra(4), rb(4), traffic(8);
    std::vector<int> acts_a, acts_b;
    for (int t = 0; t < 120; ++t) {
        const QueueState s{static_cast<int>(traffic() % 20), static_cast<int>(traffic() % 20)};
        acts_a.push_back(a.step(s, 0.1 * (t % 7), ra).index);
        acts_b.push_back(b.step(s, 0.1 * (t % 7), rb).index);
        if (t == 1) CHECK(a.replay().size() == 1);
        if (t == 100) CHECK_FALSE(a.target() == a.online());
    }
    CHECK(acts_a == acts_b);
    CHECK(a.copies() == 1);
    CHECK(a.target() == a.online());
}

TEST_CASE("greedy learner follows the expert's split before any update") {
    AgentConfig cfg;
    cfg.mode = QMode::Table;
    cfg.q.epsilon = 0.0;
    auto expert = std::make_shared<QTable>((cfg.queue_cap + 1) * (cfg.queue_cap + 1), cfg.rbs);
    const QueueState s{4, 9};
    const int si = state_index(s, cfg.queue_cap);
    for (int a = 0; a < cfg.rbs; ++a) expert->set(si, a, -std::abs(a - 6.0));
    AgentConfig lc = cfg;
    lc.edge_compute = true;
    SlicingAgent learner(lc, 3);
    learner.attach_transfer(expert, nullptr);
    Rng rng(1);
    CHECK(learner.step(s, 0.0, rng).index == 6);
}

TEST_CASE("agent checkpoint round trip") {
    AgentConfig cfg;
    SlicingAgent a(cfg, 1);
    Rng rng(2);
    for (int t = 0; t < 80; ++t) a.step({t % 5, t % 3}, 1.0, rng);
    std::stringstream ss;
    a.save(ss);
    SlicingAgent b(cfg, 99);
    b.load(ss);
    CHECK(b.table() == a.table());
    CHECK(b.online() == a.online());
}

// ---------------------------------------------------------------- networks

TEST_CASE("LSTM forward") {
    LstmNet z({1, 3, 2, 4});
    const Sequence seq{{0.2}, {0.9}, {0.4}};
    for (double y : z.forward(seq)) CHECK(y == 0.0);

    Rng rng(1);
    z.init_uniform(rng, 0.3);
    CHECK(z.forward(seq) == z.forward(seq));

    // One unit, one step: c = i g, h = o tanh(c), y = w h + b.
    LstmNet one({1, 1, 1, 1});
    REQUIRE(one.param_count() == 14);
    auto p = one.params();
    const double x = 0.7;
    const double wx[4] = {0.5, -0.3, 0.8, 1.1}, bb[4] = {0.1, 0.2, -0.4, 0.05};
    for (int k = 0; k < 4; ++k) {
        p[2 * k] = wx[k];
        p[2 * k + 1] = 0.9;  // recurrent weight, unused at t = 0
        p[8 + k] = bb[k];
    }
    p[12] = 1.5;
    p[13] = -0.25;
    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    const double i = sig(wx[0] * x + bb[0]), g = std::tanh(wx[2] * x + bb[2]), o = sig(wx[3] * x + bb[3]);
    const double expect = 1.5 * o * std::tanh(i * g) - 0.25;
    CHECK(one.forward({{x}})[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("LSTM gradient matches central differences") {
    Rng rng(21);
    LstmNet net({3, 3, 2, 4});
    net.init_uniform(rng, 0.5);
    Sequence seq;
    for (int t = 0; t < 4; ++t) seq.push_back({uniform01(rng), uniform01(rng) - 0.5, uniform01(rng)});
    const Vec target{0.3, -0.2, 0.8, 0.1}, w{1.0, 0.5, 2.0, 1.0};
    Vec grad(net.param_count(), 0.0);
    net.accumulate_gradient(seq, target, w, grad);
    const double h = 1e-5;
    for (int k = 0; k < 10; ++k) {
        const auto idx = std::uniform_int_distribution<std::size_t>(0, net.param_count() - 1)(rng);
        const double keep = net.params()[idx];
        net.params()[idx] = keep + h;
        const double up = lstm_loss(net, seq, target, w);
        net.params()[idx] = keep - h;
        const double down = lstm_loss(net, seq, target, w);
        net.params()[idx] = keep;
        CHECK(rel_err(grad[idx], (up - down) / (2 * h)) < 1e-4);
    }
}

TEST_CASE("LSTM loss is zero when targets equal predictions") {
    Rng rng(2);
    LstmNet net({1, 4, 1, 3});
    net.init_uniform(rng, 0.2);
    const Sequence seq{{0.1}, {0.5}};
    const Vec y = net.forward(seq);
    Vec grad(net.param_count(), 0.0);
    const Vec w(3, 1.0);
    net.accumulate_gradient(seq, y, w, grad);
    for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("FNN gradient matches central differences") {
    Rng rng(33);
    FeedForwardNet net({6, 5, 5, 4});
    net.init_uniform(rng, 1.0);
    const Vec x{0.1, 1.0, 0.0, 1.0, 0.5, 0.0};
    const Vec t{0.0, 0.5, 0.5, 0.0};
    Vec grad(net.params().size(), 0.0);
    net.accumulate_gradient(x, t, grad);
    const double h = 1e-5;
    for (int k = 0; k < 10; ++k) {
        const auto idx = std::uniform_int_distribution<std::size_t>(0, grad.size() - 1)(rng);
        const double keep = net.params()[idx];
        net.params()[idx] = keep + h;
        const double up = net.cross_entropy(x, t);
        net.params()[idx] = keep - h;
        const double down = net.cross_entropy(x, t);
        net.params()[idx] = keep;
        CHECK(rel_err(grad[idx], (up - down) / (2 * h)) < 1e-4);
    }
}

TEST_CASE("FNN softmax and init range") {
    Rng rng(4);
    FeedForwardNet net({10, 60, 60, 13});
    net.init_uniform(rng, 4.0);
    for (double p : net.params()) CHECK(std::abs(p) <= 4.0);
    const Vec x(10, 0.5);
    const Vec y = net.forward(x);
    double s = 0.0;
    for (double v : y) s += v;
    CHECK(std::abs(s - 1.0) < 1e-9);
}

TEST_CASE("tensor checkpoint rejects shape mismatch") {
    LstmNet a({1, 3, 1, 2});
    Rng rng(1);
    a.init_uniform(rng, 0.1);
    std::stringstream ss;
    write_tensors(ss, a.tensors());
    LstmNet b({1, 3, 1, 2});
    read_tensors(ss, b.tensors());
    CHECK(a == b);
    std::stringstream ss2;
    write_tensors(ss2, a.tensors());
    LstmNet c({1, 4, 1, 2});
    CHECK_THROWS(read_tensors(ss2, c.tensors()));
}

// ---------------------------------------------------------------- MDP oracles

TEST_CASE("policy value closed forms") {
    FiniteMdp m(1, 1);
    m.prob(0, 0, 0) = 1.0;
    m.reward(0, 0) = 1.0;
    const StochasticPolicy pi{{1.0}};
    CHECK(policy_value(m, pi, 0.9)[0] == doctest::Approx(10.0));
    Rng rng(2);
    const FiniteMdp r = FiniteMdp::random(3, 2, rng);
    const StochasticPolicy half(3, {0.5, 0.5});
    const auto q0 = policy_value(r, half, 0.0);
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) CHECK(q0[s * 2 + a] == doctest::Approx(r.reward(s, a)));
}

TEST_CASE("policy value agrees with Monte Carlo") {
    Rng rng(8);
    FiniteMdp m = FiniteMdp::random(4, 2, rng);
    for (auto& x : m.r) x += 1.5;  // keep values away from zero so 1% is meaningful
    const StochasticPolicy pi{{0.3, 0.7}, {0.5, 0.5}, {0.9, 0.1}, {0.2, 0.8}};
    const double gamma = 0.7;
    const auto q = policy_value(m, pi, gamma);
    const int s0 = 1, a0 = 0, horizon = 70;
    const int n = 1'000'000;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        int s = s0, a = a0;
        double g = 0.0, disc = 1.0;
        for (int t = 0; t < horizon; ++t) {
            g += disc * m.reward(s, a);
            disc *= gamma;
            s = m.next_state(s, a, rng);
            a = uniform01(rng) < pi[s][0] ? 0 : 1;
        }
        total += g;
    }
    const double mc = total / n;
    CHECK(std::abs(mc - q[s0 * 2 + a0]) / std::abs(q[s0 * 2 + a0]) < 0.01);
}

TEST_CASE("value iteration satisfies the Bellman optimality equation") {
    Rng rng(3);
    const FiniteMdp m = FiniteMdp::random(4, 3, rng);
    const double gamma = 0.9;
    const auto q = value_iteration(m, gamma);
    for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 3; ++a) {
            double v = m.reward(s, a);
            for (int s1 = 0; s1 < 4; ++s1)
                v += gamma * m.prob(s, a, s1) * std::max({q[s1 * 3], q[s1 * 3 + 1], q[s1 * 3 + 2]});
            CHECK(q[s * 3 + a] == doctest::Approx(v).epsilon(1e-9));
        }
}

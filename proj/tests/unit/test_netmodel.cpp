#include "jamslice/errors.hpp"
#include "jamslice/netmodel.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace jamslice;

namespace {

// One gNB, one UE, one RB: p q = 0.5 mW over a 0.1 mW noise floor.
struct SingleLink {
    ChannelState ch{1, 1, 1};
    Allocation alloc{1, 1, 1};
    SingleLink() {
        ch.p(0, 0) = 1.0;
        ch.g(0, 0, 0) = 0.5;
        ch.noise_density_mw_hz = 0.1 / ch.rb_bandwidth_hz;
        alloc.set(0, 0, 0);
    }
};

} // namespace

TEST_CASE("path loss formula") {
    CHECK(path_loss_db(1.0) == doctest::Approx(128.1));
    CHECK(path_loss_db(0.5) == doctest::Approx(116.782).epsilon(1e-5));
    CHECK(path_loss_db(0.125) == doctest::Approx(94.144).epsilon(1e-5));
}

TEST_CASE("channel gain is a dB to linear conversion of the link budget") {
    Topology t;
    t.gnbs.push_back(GnbSpec{});
    const double d_km = std::pow(10.0, (100.0 - 128.1) / 37.6);
    t.ues.push_back(UeSpec{0, {d_km * 1000.0, 0.0}, Slice::Embb, 0});
    const LinkBudget flat{0.0, 0.0, 0.0};
    CHECK(channel_gain(t, 0, 0, 0, 7, flat) == doctest::Approx(1e-10).epsilon(1e-9));
    const LinkBudget def;
    CHECK(channel_gain(t, 0, 0, 0, 7, def) == channel_gain(t, 0, 0, 0, 7, def));
}

TEST_CASE("shadowing sample deviation matches sigma") {
    double s = 0.0, ss = 0.0;
    const int n = 10000;
    for (int u = 0; u < n; ++u) {
        const double x = shadowing_db(42, 0, u, 8.0);
        s += x;
        ss += x * x;
    }
    const double mean = s / n;
    const double sd = std::sqrt(ss / n - mean * mean);
    CHECK(sd == doctest::Approx(8.0).epsilon(0.5 / 8.0));
}

TEST_CASE("legitimate SINR") {
    SingleLink l;
    CHECK(sinr(l.ch, l.alloc, 0, 0) == doctest::Approx(5.0));
    Allocation none(1, 1, 1);
    CHECK(sinr(l.ch, none, 0, 0) == 0.0);

    // Two cells: serving p q = 0.5, noise 0.1, neighbor p' g' = 0.4 on the same RB.
    ChannelState ch(2, 2, 1);
    ch.p(0, 0) = 1.0;
    ch.p(1, 0) = 1.0;
    ch.g(0, 0, 0) = 0.5;
    ch.g(1, 0, 0) = 0.4;
    ch.noise_density_mw_hz = 0.1 / ch.rb_bandwidth_hz;
    Allocation a(2, 2, 1);
    a.set(0, 0, 0);
    a.set(1, 1, 0);
    CHECK(sinr(ch, a, 0, 0) == doctest::Approx(1.0));
    a.set(1, 1, 0, false);
    CHECK(sinr(ch, a, 0, 0) == doctest::Approx(5.0));
}

TEST_CASE("jammed SINR") {
    SingleLink l;
    CHECK(sinr_jammed(l.ch, l.alloc, 0, 0, 0.0) == sinr(l.ch, l.alloc, 0, 0));
    CHECK(sinr_jammed(l.ch, l.alloc, 0, 0, 0.9) == doctest::Approx(0.5));
    double prev = sinr(l.ch, l.alloc, 0, 0);
    for (double j = 1e-6; j < 1e9; j *= 3.0) {
        const double s = sinr_jammed(l.ch, l.alloc, 0, 0, j);
        CHECK(s < prev);
        prev = s;
    }
    CHECK(prev < 1e-9);
    CHECK_THROWS_AS(sinr_jammed(l.ch, l.alloc, 0, 0, -1.0), DomainError);
}

TEST_CASE("throughput is a Shannon sum") {
    SingleLink l;
    l.ch.rb_bandwidth_hz = 1e6;
    l.ch.noise_density_mw_hz = 0.5 / 1e6;  // SINR 1
    CHECK(throughput_mbps(l.ch, l.alloc, 0, 0) == doctest::Approx(1.0));
    l.ch.noise_density_mw_hz = 0.5 / 3.0 / 1e6;  // SINR 3
    CHECK(throughput_mbps(l.ch, l.alloc, 0, 0) == doctest::Approx(2.0));
    Allocation none(1, 1, 1);
    CHECK(throughput_mbps(l.ch, none, 0, 0) == 0.0);
}

TEST_CASE("delay decomposition and objective") {
    DelayBreakdown d{1.0, 0.0, 0.5, 0.2, 9.0, true};
    CHECK(total_delay_ms(d) == doctest::Approx(1.7));
    d.at_edge = false;
    CHECK(total_delay_ms(d) == doctest::Approx(10.5));
    CHECK(total_delay_ms(DelayBreakdown{0, 0, 0, 0, 0, true}) == 0.0);

    ObjectiveWeights w;
    CHECK(objective_reward(2.0, 0.5, w) == doctest::Approx(2.5));
    CHECK(objective_reward(0.0, w.target_delay_ms, w) == doctest::Approx(0.0));
    w.urllc = 0.0;
    CHECK(objective_reward(3.25, 7.0, w) == doctest::Approx(3.25));
}

TEST_CASE("constraint checker catches each injected violation") {
    Rng rng(3);
    TopologyParams tp;
    const Topology topo = Topology::build(tp, rng);
    const int ues = static_cast<int>(topo.ues.size());
    Allocation a(tp.gnbs, ues, tp.rbs);
    const auto mine = topo.ues_of(0, Slice::Embb);
    for (int r = 0; r < tp.rbs; ++r) a.set(0, mine[r % mine.size()], r);
    a.compute(0) = {0.5e9, 0.5e9};
    CHECK(check_constraints(a, topo).empty());

    SUBCASE("shared RB") {
        a.set(0, mine[1], 0);
        const auto v = check_constraints(a, topo);
        REQUIRE(!v.empty());
        CHECK(v.front().kind == ConstraintKind::SharedRb);
        CHECK(v.front().rb == 0);
    }
    SUBCASE("more RBs than the gNB owns") {
        Allocation wide(tp.gnbs, ues, tp.rbs + 1);
        for (int r = 0; r <= tp.rbs; ++r) wide.set(0, mine[r % mine.size()], r);
        bool found = false;
        for (const auto& v : check_constraints(wide, topo)) found |= v.kind == ConstraintKind::RbOverAllocation;
        CHECK(found);
    }
    SUBCASE("compute over budget") {
        a.compute(0) = {0.7e9, 0.4e9};
        const auto v = check_constraints(a, topo);
        REQUIRE(v.size() == 1);
        CHECK(v.front().kind == ConstraintKind::ComputeOverAllocation);
    }
}

TEST_CASE("topology is deterministic and consistent") {
    TopologyParams tp;
    Rng a(9), b(9);
    const Topology x = Topology::build(tp, a), y = Topology::build(tp, b);
    REQUIRE(x.ues.size() == y.ues.size());
    for (std::size_t i = 0; i < x.ues.size(); ++i) {
        CHECK(x.ues[i].pos.x_m == y.ues[i].pos.x_m);
        CHECK(x.ues[i].pos.y_m == y.ues[i].pos.y_m);
    }
    CHECK(x.violations(tp.max_tx_power_dbm).empty());
    CHECK(static_cast<int>(x.ues_of(1, Slice::Urllc).size()) == tp.urllc_ues);
}

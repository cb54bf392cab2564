#include "jamslice/attacks.hpp"
#include "jamslice/errors.hpp"
#include "jamslice/mitigation.hpp"
#include "jamslice/netmodel.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace jamslice;

namespace {

SensingReport busy_report(const std::vector<std::uint8_t>& busy) {
    SensingReport r;
    r.busy = busy;
    r.slots.assign(busy.size(), {});
    return r;
}

} // namespace

// ---------------------------------------------------------------- jammers

TEST_CASE("constant jammer power") {
    const std::vector<double> ones{1.0, 1.0};
    CHECK(cja_power(ones, 2) == doctest::Approx(2.0));
    const std::vector<double> zeros{0.0, 0.0, 0.0};
    CHECK(cja_power(zeros, 3) == 0.0);
    const std::vector<double> l{2.0, 3.0, 2.0};
    CHECK(cja_power(l, 2) == doctest::Approx(24.5));
}

TEST_CASE("noise ceiling and detection threshold") {
    CHECK(t_max_dbm(1.0) == doctest::Approx(-75.0).epsilon(1e-4));
    CHECK(t_max_dbm(10.0) == doctest::Approx(-65.0).epsilon(1e-4));
    CHECK(t_max_dbm(20.0) == doctest::Approx(-61.99).epsilon(1e-4));
    CHECK(detection_threshold_dbm(-75.0, -52.0) == doctest::Approx(-65.0));
    CHECK(detection_threshold_dbm(-55.0, -70.0) == doctest::Approx(-70.0));
}

TEST_CASE("slot sensing needs enough idle time") {
    const double hi = -40.0, lo = -90.0;
    std::vector<double> four(9, hi), three(9, hi);
    std::fill(four.begin(), four.begin() + 4, lo);
    std::fill(three.begin() + 2, three.begin() + 5, lo);
    CHECK(sense_slot(four, 1.0, 9.0, -65.0) == SlotVerdict::Idle);
    CHECK(sense_slot(three, 1.0, 9.0, -65.0) == SlotVerdict::Busy);
    CHECK(sense_slot(std::vector<double>(9, lo), 1.0, 9.0, -65.0) == SlotVerdict::Idle);
}

TEST_CASE("jammer reward") {
    CHECK(drlja_reward(1.0, 1.0, 0.5, 1.0) == doctest::Approx(-1.5));
    CHECK(drlja_reward(0.0, 0.0, 0.8, 0.2) == 0.0);
}

TEST_CASE("energy ledger") {
    EnergyLedger l(10);
    l.spend(4);
    CHECK(l.remaining() == 6);
    CHECK(l.initial() == l.spent() + l.remaining());
    CHECK_THROWS_AS(l.spend(7), DomainError);
    CHECK_THROWS_AS(l.spend(-1), DomainError);
    l.reset();
    CHECK(l.remaining() == 10);
}

TEST_CASE("jam patterns never hit idle RBs and respect the budget") {
    JammerParams p;
    Rng rng(3);
    EnergyLedger rich(1'000'000), broke(0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::uint8_t> busy(13);
        for (auto& b : busy) b = uniform01(rng) < 0.4;
        for (int k = 0; k < kJamPatterns; ++k) {
            const auto a = apply_jam_pattern(k, busy, p, rich, rng);
            for (int r : a.jammed()) CHECK(busy[r] == 1);
            CHECK(static_cast<int>(a.jammed().size()) <= p.max_rbs);
            const auto none = apply_jam_pattern(k, busy, p, broke, rng);
            CHECK(none.jammed().empty());
            CHECK(none.energy_units == 0);
        }
    }
    CHECK(apply_jam_pattern(0, std::vector<std::uint8_t>(13, 1), p, rich, rng).jammed().empty());
}

TEST_CASE("random jammer subset size is uniform") {
    JammerParams p;
    p.monitor_ttis = 1;
    RandomJammer j(p, 13);
    Rng rng(9);
    const auto rep = busy_report(std::vector<std::uint8_t>(13, 1));
    const std::vector<double> sinr(13, 1.0);
    std::vector<int> counts(p.subband_rbs + 1, 0);
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        const auto a = j.act(JamObservation{i, &rep, sinr}, rng);
        const auto hit = a.jammed();
        ++counts[hit.size()];
        for (int r : hit) CHECK((r >= j.subband_start() && r < j.subband_start() + p.subband_rbs));
    }
    for (int c : counts) CHECK(static_cast<double>(c) / n == doctest::Approx(1.0 / (p.subband_rbs + 1)).epsilon(0.05));
}

TEST_CASE("constant jammer locks onto the busiest subband") {
    JammerParams p;
    ConstantJammer j(p, 13);
    Rng rng(1);
    std::vector<std::uint8_t> busy(13, 0);
    busy[7] = busy[8] = busy[9] = 1;
    const auto rep = busy_report(busy);
    std::vector<double> sinr(13, 0.0);
    sinr[7] = sinr[8] = sinr[9] = 1e-3;
    for (int t = 0; t < p.monitor_ttis - 1; ++t) CHECK(j.act(JamObservation{t, &rep, sinr}, rng).jammed().empty());
    const auto a = j.act(JamObservation{p.monitor_ttis, &rep, sinr}, rng);
    CHECK(a.jammed() == std::vector<int>{7, 8, 9});
    CHECK(j.power_mw() == doctest::Approx(cja_power(std::vector<double>(3, 1e-3), 3)));
}

TEST_CASE("feedforward jammer learns a fixed RB") {
    JammerParams p;
    FnnJammer j(p, 13, 5);
    Rng rng(1);
    std::vector<std::uint8_t> busy(13, 0);
    busy[3] = 1;
    const auto rep = busy_report(busy);
    CHECK_FALSE(j.predict().has_value());
    for (int t = 0; t < 300; ++t) j.act(JamObservation{t, &rep, {}}, rng);
    REQUIRE(j.predict().has_value());
    CHECK(*j.predict() == 3);
    CHECK(j.act(JamObservation{300, &rep, {}}, rng).jammed() == std::vector<int>{3});
}

TEST_CASE("DRL jammer state and spending") {
    const auto rep = busy_report({1, 0, 1});
    const auto s = drlja_state(rep, 0.25);
    CHECK(s == std::vector<double>{1.0, 0.0, 1.0, 0.25});

    JammerParams p;
    p.budget_units = 50;
    DrlJammer j(p, 13, 2);
    Rng rng(4);
    const auto all = busy_report(std::vector<std::uint8_t>(13, 1));
    std::int64_t total = 0;
    for (int t = 0; t < 200; ++t) {
        const auto a = j.act(JamObservation{t, &all, {}}, rng);
        total += a.energy_units;
        j.feedback(JamFeedback{-3.0, true, all.busy});
    }
    CHECK(total == j.ledger()->spent());
    CHECK(j.ledger()->remaining() >= 0);
}

TEST_CASE("attack names round trip") {
    for (auto k : {AttackKind::None, AttackKind::Cja, AttackKind::Rja, AttackKind::DrlJa, AttackKind::Fnn})
        CHECK(parse_attack(to_string(k)) == k);
    CHECK_FALSE(parse_attack("drlja").has_value());
}

// ---------------------------------------------------------------- mitigation

TEST_CASE("decoy power helpers") {
    DecoyPlan plan;
    plan.power_mw = {0.5, 1.5, 2.0};
    CHECK(decoy_power_total(plan) == doctest::Approx(4.0));
    const std::vector<std::complex<double>> xs{{1.0, 1.0}, {0.0, 2.0}};
    CHECK(avg_signal_power(xs) == doctest::Approx(3.0));
    const std::vector<double> sinr{1.0, 3.0};
    CHECK(mitigation_reward(sinr) == doctest::Approx(2.0));
    CHECK(mitigation_reward({}) == 0.0);
}

TEST_CASE("defender state") {
    const std::vector<std::uint8_t> alloc{1, 1, 0, 0}, jam{0, 1, 1, 0};
    const auto s = defender_state(alloc, jam);
    CHECK(s.vacant == Bits{0, 0, 1, 1});
    CHECK(s.jammed == jam);
}

TEST_CASE("decoys only use vacant RBs") {
    Rng rng(6);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::uint8_t> vacant(13);
        for (auto& v : vacant) v = uniform01(rng) < 0.5;
        for (int k = 0; k < kDecoyPatterns; ++k) {
            const auto plan = make_decoy_plan(k, vacant, 2.0, 8, rng);
            CHECK(plan.rbs.size() == plan.power_mw.size());
            for (std::size_t i = 0; i < plan.rbs.size(); ++i) {
                CHECK(vacant[plan.rbs[i]] == 1);
                CHECK(plan.power_mw[i] == doctest::Approx(2.0));
            }
        }
    }
    CHECK(decoy_set(1, std::vector<std::uint8_t>(13, 0)).empty());
}

TEST_CASE("decoy defender never targets allocated RBs") {
    DefenderParams p;
    DecoyDefender d(p, 13);
    Rng rng(2);
    std::optional<double> reward;
    for (int t = 0; t < 500; ++t) {
        std::vector<std::uint8_t> alloc(13), jam(13);
        for (int r = 0; r < 13; ++r) {
            alloc[r] = uniform01(rng) < 0.6;
            jam[r] = uniform01(rng) < 0.2;
        }
        const auto s = defender_state(alloc, jam);
        const auto plan = d.step(s, reward, 1.0, rng);
        for (int r : plan.rbs) CHECK(alloc[r] == 0);
        reward = uniform01(rng);
    }
    CHECK(d.known_states() > 0);
}

TEST_CASE("feedforward defender labels the jammed region") {
    std::vector<std::uint8_t> jam(12, 0);
    CHECK_FALSE(FnnDefender::label_for(jam, 12).has_value());
    jam[10] = jam[11] = 1;
    const int lbl = *FnnDefender::label_for(jam, 12);
    const auto reg = decoy_region(lbl, 12);
    CHECK(reg.begin == 8);
    CHECK(reg.end == 12);
}

TEST_CASE("suspend learning") {
    KnowledgeRepository repo{1.0, 10.0, true};
    CHECK(suspend_learning_step(repo, 1.2, 8.0) == SuspendDecision::Suspend);
    CHECK(suspend_learning_step(repo, 1.2, 10.0) == SuspendDecision::Learn);
    CHECK(suspend_learning_step(repo, 1.0, 8.0) == SuspendDecision::Learn);
    CHECK_THROWS_AS(suspend_learning_step(KnowledgeRepository{}, 1.0, 1.0), ConfigError);
}

TEST_CASE("knowledge repository averages the runs nearest the median") {
    std::vector<std::uint64_t> few{1, 2, 3};
    auto runner = [](std::uint64_t s) { return MonitorSample{double(s), 10.0 * s, double(s)}; };
    CHECK_THROWS_AS(build_knowledge_repo(runner, few), ConfigError);
    std::vector<std::uint64_t> seeds(11);
    std::iota(seeds.begin(), seeds.end(), 0);
    const auto repo = build_knowledge_repo(runner, seeds);
    // median 5, nearest five are 3..7
    CHECK(repo.power_mw == doctest::Approx(5.0));
    CHECK(repo.sinr == doctest::Approx(50.0));
    CHECK(build_knowledge_repo(runner, seeds).power_mw == repo.power_mw);
}

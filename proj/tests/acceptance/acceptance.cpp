// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "jamslice/attacks.hpp"
#include "jamslice/dtrl.hpp"
#include "jamslice/engine.hpp"
#include "jamslice/experiment.hpp"
#include "jamslice/mdp.hpp"
#include "jamslice/metrics.hpp"
#include "jamslice/netmodel.hpp"
#include "jamslice/nn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

using namespace jamslice;

namespace {

constexpr int kSeeds = 10;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
    std::printf("%s criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

int workers() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

std::string f1(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.1f", x);
    return b;
}

// Invariants every full run must satisfy; counted across all scenarios.
struct Invariants {
    int runs = 0;
    int unbalanced = 0;
    int energy_leaks = 0;
    int decoys_on_data = 0;

    void check(const RunRecord& r) {
        ++runs;
        for (const auto* l : {&r.expert_embb, &r.expert_urllc, &r.learner_embb, &r.learner_urllc})
            if (!l->balanced()) ++unbalanced;
        for (auto p : {Phase::Expert, Phase::Learner}) {
            std::int64_t spent = 0;
            for (const auto& t : r.phase(p)) {
                spent += t.energy_units;
                if (t.budget_remaining >= 0 && t.budget_remaining != r.jammer_budget_initial - spent) ++energy_leaks;
                for (int d : t.decoys)
                    if (std::find(t.allocated.begin(), t.allocated.end(), d) != t.allocated.end()) ++decoys_on_data;
            }
        }
    }
    bool ok() const { return unbalanced == 0 && energy_leaks == 0 && decoys_on_data == 0; }
};

Invariants invariants;

ScenarioResult run_named(const std::string& name, const nlohmann::json& overrides) {
    ExperimentManifest m;
    m.name = "acceptance";
    m.seeds.clear();
    for (int i = 1; i <= kSeeds; ++i) m.seeds.push_back(static_cast<std::uint64_t>(i));
    const ScenarioSpec spec{name, overrides};
    const auto cfgs = scenario_configs(m, spec);
    auto items = run_batch(cfgs, workers());
    ScenarioResult sr;
    sr.name = name;
    ScenarioConfig view = cfgs.front();
    view.seed = 0;
    sr.config = to_json(view);
    for (auto& it : items) {
        if (!it.ok) {
            std::cerr << name << ": " << it.error << "\n";
            continue;
        }
        invariants.check(it.record);
        sr.runs.push_back(digest(it.record));
        it.record = RunRecord{};
    }
    return sr;
}

void add(ResultSet& res, AttackKind a, MitigationKind m, const std::string& suffix = "",
         nlohmann::json extra = nlohmann::json::object()) {
    const std::string name = scenario_name(a, m, suffix);
    nlohmann::json o = scenario_overrides(a, m);
    o.merge_patch(extra);
    const auto t0 = std::chrono::steady_clock::now();
    res[name] = run_named(name, o);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "ran " << name << " in " << f1(s) << " s\n";
}

Outcome from_checks(const std::vector<Check>& checks, std::initializer_list<std::size_t> idx) {
    Outcome o{true, ""};
    for (auto i : idx) {
        const auto& c = checks.at(i);
        o.pass = o.pass && c.evaluated && c.pass;
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += c.name + ": " + c.detail;
    }
    return o;
}

double lstm_loss(const LstmNet& net, const Sequence& seq, const Vec& t, const Vec& w) {
    const Vec y = net.forward(seq);
    double l = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) l += 0.5 * w[k] * (y[k] - t[k]) * (y[k] - t[k]);
    return l;
}

double rel_err(double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8}); }

// ---------------------------------------------------------------- criteria

Outcome convergence(const ScenarioResult& none) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    int learner_first = 0;
    std::vector<double> expert;
    for (const auto& d : none.runs) {
        const double e = d.learner.expert_convergence ? double(*d.learner.expert_convergence) : inf;
        const double l = d.learner.learner_convergence ? double(*d.learner.learner_convergence) : inf;
        expert.push_back(e);
        if (l < e) ++learner_first;
    }
    std::sort(expert.begin(), expert.end());
    const double med = expert.empty() ? inf : 0.5 * (expert[(expert.size() - 1) / 2] + expert[expert.size() / 2]);
    Outcome o;
    o.pass = learner_first >= 8 && med >= 500 && med <= 2000;
    o.detail = "learner first in " + std::to_string(learner_first) + "/" + std::to_string(none.runs.size()) +
               " seeds, median expert convergence " + (std::isinf(med) ? std::string("never") : f1(med)) + " TTIs";
    return o;
}

Outcome monotone(const ResultSet& res, const std::vector<std::string>& names, const std::string& label) {
    const auto& base = res.at(scenario_name(AttackKind::None, MitigationKind::None)).kpis(Phase::Learner);
    Outcome o{true, label + " "};
    for (auto k : {KpiKind::Throughput, KpiKind::Latency}) {
        double prev = -std::numeric_limits<double>::infinity();
        o.detail += std::string(to_string(k)) + " [";
        for (std::size_t i = 0; i < names.size(); ++i) {
            const auto d = paired_degradation(res.at(names[i]).kpis(Phase::Learner), base, k);
            const double v = d ? d->mean : std::numeric_limits<double>::quiet_NaN();
            o.detail += (i ? " " : "") + f1(v);
            if (!(v >= prev)) o.pass = false;
            prev = v;
        }
        o.detail += "] ";
    }
    return o;
}

Outcome q_learning_oracle() {
    Rng rng(11);
    const FiniteMdp mdp = FiniteMdp::random(4, 3, rng);
    const auto qstar = value_iteration(mdp, 0.5);
    const auto q = q_learning_sweeps(mdp, 0.5, 4'000'000, rng);
    double err = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) err = std::max(err, std::abs(q[i] - qstar[i]));
    char b[96];
    std::snprintf(b, sizeof b, "max |Q - Q*| = %.2e on a 4x3 MDP", err);
    return {err < 1e-3, b};
}

Outcome policy_value_oracle() {
    Rng rng(8);
    FiniteMdp m = FiniteMdp::random(4, 2, rng);
    for (auto& x : m.r) x += 1.5;
    const StochasticPolicy pi{{0.3, 0.7}, {0.5, 0.5}, {0.9, 0.1}, {0.2, 0.8}};
    const double gamma = 0.7;
    const auto q = policy_value(m, pi, gamma);
    double worst = 0.0;
    for (int s0 = 0; s0 < 4; ++s0) {
        const int a0 = s0 % 2;
        double total = 0.0;
        const int n = 1'000'000;
        for (int i = 0; i < n; ++i) {
            int s = s0, a = a0;
            double g = 0.0, disc = 1.0;
            for (int t = 0; t < 70; ++t) {
                g += disc * m.reward(s, a);
                disc *= gamma;
                s = m.next_state(s, a, rng);
                a = uniform01(rng) < pi[s][0] ? 0 : 1;
            }
            total += g;
        }
        worst = std::max(worst, std::abs(total / n - q[s0 * 2 + a0]) / std::abs(q[s0 * 2 + a0]));
    }
    char b[96];
    std::snprintf(b, sizeof b, "worst relative gap %.3f%% over 4 state-action pairs", 100 * worst);
    return {worst < 0.01, b};
}

Outcome gradient_oracle() {
    Rng rng(21);
    double worst = 0.0;
    const double h = 1e-5;
    LstmNet net({3, 5, 2, 4});
    net.init_uniform(rng, 0.5);
    Sequence seq;
    for (int t = 0; t < 4; ++t) seq.push_back({uniform01(rng), uniform01(rng) - 0.5, uniform01(rng)});
    const Vec target{0.3, -0.2, 0.8, 0.1}, w{1.0, 0.5, 2.0, 1.0};
    Vec g(net.param_count(), 0.0);
    net.accumulate_gradient(seq, target, w, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double keep = net.params()[i];
        net.params()[i] = keep + h;
        const double up = lstm_loss(net, seq, target, w);
        net.params()[i] = keep - h;
        const double down = lstm_loss(net, seq, target, w);
        net.params()[i] = keep;
        worst = std::max(worst, rel_err(g[i], (up - down) / (2 * h)));
    }
    FeedForwardNet fnn({6, 8, 8, 5});
    fnn.init_uniform(rng, 1.0);
    const Vec x{0.1, 1.0, 0.0, 1.0, 0.5, 0.0}, t{0.0, 0.5, 0.5, 0.0, 0.0};
    Vec gf(fnn.params().size(), 0.0);
    fnn.accumulate_gradient(x, t, gf);
    for (std::size_t i = 0; i < gf.size(); ++i) {
        const double keep = fnn.params()[i];
        fnn.params()[i] = keep + h;
        const double up = fnn.cross_entropy(x, t);
        fnn.params()[i] = keep - h;
        const double down = fnn.cross_entropy(x, t);
        fnn.params()[i] = keep;
        worst = std::max(worst, rel_err(gf[i], (up - down) / (2 * h)));
    }
    char b[96];
    std::snprintf(b, sizeof b, "worst relative error %.2e over every LSTM and FNN parameter", worst);
    return {worst < 1e-4, b};
}

// SINR identities, eCDF shape and the constraint checker on fuzzed inputs.
Outcome model_properties() {
    Rng rng(77);
    int bad_identity = 0, bad_monotone = 0, bad_ecdf = 0, missed = 0;
    for (int trial = 0; trial < 500; ++trial) {
        ChannelState ch(2, 2, 3);
        for (int g = 0; g < 2; ++g)
            for (int r = 0; r < 3; ++r) ch.p(g, r) = 0.1 + uniform01(rng);
        for (int g = 0; g < 2; ++g)
            for (int u = 0; u < 2; ++u)
                for (int r = 0; r < 3; ++r) ch.g(g, u, r) = 1e-9 * (0.01 + uniform01(rng));
        Allocation a(2, 2, 3);
        for (int r = 0; r < 3; ++r) {
            a.set(0, 0, r, uniform01(rng) < 0.7);
            a.set(1, 1, r, uniform01(rng) < 0.5);
        }
        if (sinr_jammed(ch, a, 0, 0, 0.0) != sinr(ch, a, 0, 0)) ++bad_identity;
        if (sinr(ch, a, 0, 0) > 0.0) {
            double prev = sinr(ch, a, 0, 0);
            for (double j = 1e-15; j < 1e3; j *= 10.0) {
                const double s = sinr_jammed(ch, a, 0, 0, j);
                if (!(s < prev)) ++bad_monotone;
                prev = s;
            }
        }
        std::vector<double> xs(50);
        for (auto& x : xs) x = std::floor(10.0 * uniform01(rng));
        const Ecdf f(xs);
        double last = 0.0;
        for (const auto& p : f.points()) {
            if (p.f < last || p.f < 0.0 || p.f > 1.0) ++bad_ecdf;
            last = p.f;
        }
        if (last != 1.0) ++bad_ecdf;
    }

    TopologyParams tp;
    const Topology topo = Topology::build(tp, rng);
    const int ues = static_cast<int>(topo.ues.size());
    const auto mine = topo.ues_of(0, Slice::Embb);
    auto clean = [&](int rbs) {
        Allocation a(tp.gnbs, ues, rbs);
        for (int r = 0; r < rbs; ++r) a.set(0, mine[r % mine.size()], r);
        a.compute(0) = {0.5 * tp.compute_hz, 0.5 * tp.compute_hz};
        return a;
    };
    auto has = [&](const Allocation& a, ConstraintKind k) {
        for (const auto& v : check_constraints(a, topo))
            if (v.kind == k) return true;
        return false;
    };
    if (!check_constraints(clean(tp.rbs), topo).empty()) ++missed;
    Allocation shared = clean(tp.rbs);
    shared.set(0, mine[1], 0);
    if (!has(shared, ConstraintKind::SharedRb)) ++missed;
    if (!has(clean(tp.rbs + 1), ConstraintKind::RbOverAllocation)) ++missed;
    Allocation cpu = clean(tp.rbs);
    cpu.compute(0) = {0.7 * tp.compute_hz, 0.4 * tp.compute_hz};
    if (!has(cpu, ConstraintKind::ComputeOverAllocation)) ++missed;

    return {bad_identity + bad_monotone + bad_ecdf + missed == 0,
            "zero-jam identity failures " + std::to_string(bad_identity) + ", monotonicity failures " +
                std::to_string(bad_monotone) + ", eCDF failures " + std::to_string(bad_ecdf) +
                ", missed constraint violations " + std::to_string(missed) + " of 3"};
}

Outcome parallel_determinism() {
    ScenarioConfig base;
    base.expert_ttis = 600;
    base.learner_ttis = 600;
    base.attack = AttackKind::DrlJa;
    base.mitigation.kind = MitigationKind::DecoyDrl;
    const auto cfgs = seed_sweep(base, 4);
    const auto a = run_batch(cfgs, 1), b = run_batch(cfgs, 4);
    int same = 0;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        if (!a[i].ok || !b[i].ok) continue;
        std::ostringstream sa, sb;
        sa << summary_json(a[i].record).dump();
        sb << summary_json(b[i].record).dump();
        for (const auto& t : a[i].record.ttis) sa << to_json(t).dump();
        for (const auto& t : b[i].record.ttis) sb << to_json(t).dump();
        if (sa.str() == sb.str()) ++same;
    }
    return {same == static_cast<int>(cfgs.size()),
            std::to_string(same) + "/" + std::to_string(cfgs.size()) + " runs byte-identical between 1 and 4 workers"};
}

Outcome decoy_occupancy() {
    ScenarioConfig cfg;
    cfg.attack = AttackKind::DrlJa;
    cfg.mitigation.kind = MitigationKind::DecoyDrl;
    const World w(cfg, nullptr);
    const int rbs = w.channel().rbs;
    const int r = rbs - 1;
    std::vector<double> rx(rbs, 0.0);
    const auto before = sense_tti(rx, w.jammer_noise_mw(), w.detection_threshold(), w.sensing_params());
    rx[r] = w.channel().p(0, r) * w.gnb_gain_to_jammer(0);
    const auto after = sense_tti(rx, w.jammer_noise_mw(), w.detection_threshold(), w.sensing_params());
    const auto s0 = drlja_state(before, 1.0), s1 = drlja_state(after, 1.0);
    bool others_same = true;
    for (int k = 0; k < rbs; ++k)
        if (k != r && s0[k] != s1[k]) others_same = false;
    const double dbm = 10.0 * std::log10(rx[r]);
    return {s0[r] == 0.0 && s1[r] == 1.0 && others_same,
            "decoy received at " + f1(dbm) + " dBm vs threshold " + f1(w.detection_threshold()) + " dBm, bit " +
                f1(s0[r]) + " -> " + f1(s1[r])};
}

} // namespace

int main() {
    std::cerr << "workers: " << workers() << "\n";
    ResultSet res;

    const auto t0 = std::chrono::steady_clock::now();
    add(res, AttackKind::None, MitigationKind::None);
    add(res, AttackKind::DrlJa, MitigationKind::None);
    const double c1_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    add(res, AttackKind::Fnn, MitigationKind::None);
    add(res, AttackKind::Cja, MitigationKind::None);
    add(res, AttackKind::Rja, MitigationKind::None);
    add(res, AttackKind::DrlJa, MitigationKind::DecoyDrl);
    add(res, AttackKind::DrlJa, MitigationKind::Suspend);
    for (int h : {10, 30, 40}) add(res, AttackKind::DrlJa, MitigationKind::None, "h" + std::to_string(h), {{"attack", {{"hidden", h}}}});
    for (int l : {2, 3}) add(res, AttackKind::DrlJa, MitigationKind::None, "l" + std::to_string(l), {{"attack", {{"layers", l}}}});

    const auto checks = headline_checks(res);

    Outcome c1 = from_checks(checks, {0, 1});
    c1.detail += "; 10 seeds of no-attack and DRL-JA in " + f1(c1_seconds) + " s";
    c1.pass = c1.pass && c1_seconds <= 600.0;
    report(1, "DRL-JA degradation", c1);
    report(2, "FNN jammer degradation", from_checks(checks, {2, 3}));
    report(3, "decoy-DRL recovery and suspend-learning baseline", from_checks(checks, {4, 5, 6}));
    report(4, "transfer speeds up convergence", convergence(res.at(scenario_name(AttackKind::None, MitigationKind::None))));

    const std::string drl = scenario_name(AttackKind::DrlJa, MitigationKind::None);
    auto sub = [&](const std::string& s) { return scenario_name(AttackKind::DrlJa, MitigationKind::None, s); };
    const Outcome hid = monotone(res, {sub("h10"), drl, sub("h30"), sub("h40")}, "hidden 10/20/30/40:");
    const Outcome lay = monotone(res, {drl, sub("l2"), sub("l3")}, "layers 1/2/3:");
    report(5, "degradation grows with jammer capacity", {hid.pass && lay.pass, hid.detail + "; " + lay.detail});
    report(6, "attack ordering DRL-JA > CJA > RJA", from_checks(checks, {7, 8}));
    report(7, "tabular Q-learning vs value iteration", q_learning_oracle());
    report(8, "policy value vs Monte Carlo", policy_value_oracle());
    report(9, "analytic gradients vs finite differences", gradient_oracle());
    const Outcome props = model_properties();
    report(10, "model and run invariants",
           {props.pass && invariants.ok() && invariants.runs == 12 * kSeeds,
            props.detail + "; " + std::to_string(invariants.runs) + " full runs: unbalanced packet ledgers " +
                std::to_string(invariants.unbalanced) + ", energy mismatches " + std::to_string(invariants.energy_leaks) +
                ", decoys on data RBs " + std::to_string(invariants.decoys_on_data)});
    report(11, "serial and parallel runs identical", parallel_determinism());
    report(12, "a decoy flips the jammer's occupancy bit", decoy_occupancy());

    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

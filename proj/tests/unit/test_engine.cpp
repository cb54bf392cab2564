#include "jamslice/engine.hpp"
#include "jamslice/errors.hpp"
#include "jamslice/experiment.hpp"
#include "jamslice/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace jamslice;
namespace fs = std::filesystem;

namespace {

ScenarioConfig short_config(AttackKind a = AttackKind::None, MitigationKind m = MitigationKind::None) {
    ScenarioConfig c;
    c.expert_ttis = 200;
    c.learner_ttis = 200;
    c.attack = a;
    c.mitigation.kind = m;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("jamslice-test-" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

// ---------------------------------------------------------------- metrics

TEST_CASE("empirical CDF") {
    const Ecdf f({3.0, 1.0, 2.0, 2.0});
    CHECK(f(0.5) == 0.0);
    CHECK(f(1.0) == doctest::Approx(0.25));
    CHECK(f(2.0) == doctest::Approx(0.75));
    CHECK(f(9.0) == 1.0);
    CHECK(f.points().size() == 3);
    CHECK(f.quantile(0.5) == 2.0);
    CHECK(f.quantile(1.0) == 3.0);
}

TEST_CASE("degradation and recovery") {
    CHECK(degradation(60.0, 100.0, KpiKind::Throughput) == doctest::Approx(40.0));
    CHECK(degradation(15.0, 10.0, KpiKind::Latency) == doctest::Approx(50.0));
    CHECK(recovery(90.0, 60.0, KpiKind::Throughput) == doctest::Approx(50.0));
    CHECK(recovery(12.0, 15.0, KpiKind::Latency) == doctest::Approx(20.0));
}

TEST_CASE("convergence detection") {
    const std::vector<double> flat(1000, 2.0);
    CHECK(convergence_point(flat) == ConvergenceRule{}.window);
    std::vector<double> ramp(1000);
    for (int i = 0; i < 1000; ++i) ramp[i] = 0.01 * i;
    CHECK_FALSE(convergence_point(ramp).has_value());
    const std::vector<double> e = ema(flat, 100);
    CHECK(e.back() == 2.0);
}

TEST_CASE("mean and sample deviation") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const auto m = mean_std(x);
    CHECK(m.mean == doctest::Approx(2.5));
    CHECK(m.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(m.n == 4);
}

// ---------------------------------------------------------------- engine

TEST_CASE("a run records every TTI of both phases") {
    const auto r = run_scenario(short_config());
    CHECK(r.ttis.size() == 400);
    CHECK(r.phase(Phase::Expert).size() == 200);
    CHECK(r.phase(Phase::Learner).front().tti == 200);
    for (const auto& t : r.ttis) {
        CHECK(t.jammed.empty());
        CHECK(t.decoys.empty());
        CHECK(t.energy_units == 0);
    }
    for (const auto* l : {&r.expert_embb, &r.expert_urllc, &r.learner_embb, &r.learner_urllc}) CHECK(l->balanced());
}

TEST_CASE("runs are deterministic and independent of parallelism") {
    const auto cfgs = seed_sweep(short_config(AttackKind::DrlJa), 3);
    const auto a = run_batch(cfgs, 1);
    const auto b = run_batch(cfgs, 3);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].ok);
        REQUIRE(b[i].ok);
        CHECK(a[i].record.seed == cfgs[i].seed);
        std::stringstream sa, sb;
        for (const auto& t : a[i].record.ttis) sa << to_json(t).dump() << "\n";
        for (const auto& t : b[i].record.ttis) sb << to_json(t).dump() << "\n";
        CHECK(sa.str() == sb.str());
    }
    const auto c = run_scenario(cfgs[0]);
    CHECK(to_json(c.ttis.back()) == to_json(a[0].record.ttis.back()));
}

TEST_CASE("jammer energy is conserved per phase") {
    for (auto k : {AttackKind::DrlJa, AttackKind::Fnn}) {
        auto cfg = short_config(k);
        cfg.jammer.budget_units = 300;
        const auto r = run_scenario(cfg);
        CHECK(r.jammer_budget_initial == 300);
        for (auto p : {Phase::Expert, Phase::Learner}) {
            std::int64_t spent = 0;
            for (const auto& t : r.phase(p)) {
                spent += t.energy_units;
                CHECK(t.budget_remaining == 300 - spent);
            }
            CHECK(spent <= 300);
        }
    }
}

TEST_CASE("decoys never land on allocated RBs") {
    for (auto m : {MitigationKind::DecoyDrl, MitigationKind::DecoyFnn}) {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            auto cfg = short_config(AttackKind::DrlJa, m);
            cfg.seed = seed;
            const auto r = run_scenario(cfg);
            for (const auto& t : r.ttis)
                for (int d : t.decoys) CHECK(std::find(t.allocated.begin(), t.allocated.end(), d) == t.allocated.end());
            for (const auto* l : {&r.expert_embb, &r.expert_urllc, &r.learner_embb, &r.learner_urllc})
                CHECK(l->balanced());
        }
    }
}

TEST_CASE("config round trip and strict parsing") {
    ScenarioConfig c = short_config(AttackKind::Cja, MitigationKind::Suspend);
    c.jammer.hidden = 30;
    const auto back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(config_hash(back) == config_hash(c));

    auto j = to_json(c);
    j["attack"]["hiden"] = 3;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    auto k = to_json(c);
    k["grid"]["rbgs"] = 0;
    try {
        config_from_json(k);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE_FALSE(e.issues().empty());
        CHECK(e.issues().front().find("grid.rbgs") != std::string::npos);
    }
    CHECK_THROWS_AS(config_with_overrides(c, {{"attack", {{"kind", "drlja"}}}}), ConfigError);
    CHECK(config_with_overrides(c, {{"attack", {{"layers", 2}}}}).jammer.layers == 2);
}

TEST_CASE("record round trip through disk") {
    const auto r = run_scenario(short_config(AttackKind::Rja));
    const fs::path dir = scratch("record");
    fs::create_directories(dir);
    write_record(r, (dir / "a.summary.json").string(), (dir / "a.ttis.jsonl").string());
    const auto back = read_record((dir / "a.summary.json").string(), (dir / "a.ttis.jsonl").string());
    CHECK(back.config_hash == r.config_hash);
    REQUIRE(back.ttis.size() == r.ttis.size());
    for (std::size_t i = 0; i < r.ttis.size(); i += 37) CHECK(to_json(back.ttis[i]) == to_json(r.ttis[i]));
    CHECK_THROWS_AS(read_record((dir / "missing.json").string(), (dir / "a.ttis.jsonl").string()), IoError);
    fs::remove_all(dir);
}

// ---------------------------------------------------------------- experiments

TEST_CASE("manifest parsing") {
    const auto m = manifest_from_json({{"name", "t"}, {"seeds", {{"first", 5}, {"count", 3}}}});
    CHECK(m.seeds == std::vector<std::uint64_t>{5, 6, 7});
    CHECK_THROWS_AS(manifest_from_json({{"name", "t"}, {"seed", 1}}), ConfigError);
    CHECK_THROWS_AS(manifest_from_json({{"seeds", {{"first", 1}, {"count", 0}}}}), ConfigError);

    ExperimentManifest dup;
    dup.scenarios = {{"a", {{"attack", {{"kind", "cja"}}}}}, {"a", {{"attack", {{"kind", "rja"}}}}}};
    CHECK_THROWS_AS(expand_scenarios(dup), ConfigError);
    ExperimentManifest bad_recipe;
    bad_recipe.recipes = {"fig99"};
    CHECK_THROWS_AS(expand_scenarios(bad_recipe), ConfigError);

    ExperimentManifest bad_cfg;
    bad_cfg.scenarios = {{"x", {{"grid", {{"rbgs", -1}}}}}};
    CHECK_FALSE(validate_manifest(bad_cfg).empty());
    CHECK(find_recipe("table5") != nullptr);
}

TEST_CASE("experiment output is parallelism independent and the report regenerates") {
    ExperimentManifest m;
    m.name = "unit";
    m.base = {{"run", {{"expert_ttis", 150}, {"learner_ttis", 150}}}};
    m.seeds = {1, 2};
    m.scenarios = {{scenario_name(AttackKind::None, MitigationKind::None), scenario_overrides(AttackKind::None, MitigationKind::None)},
                   {scenario_name(AttackKind::Cja, MitigationKind::None), scenario_overrides(AttackKind::Cja, MitigationKind::None)}};
    const fs::path a = scratch("exp-a"), b = scratch("exp-b");
    RunOptions oa{a, 1, 0, {}}, ob{b, 2, 0, {}};
    const auto ra = run_experiment(m, oa);
    const auto rb = run_experiment(m, ob);
    CHECK(ra.completed == 4);
    CHECK(ra.failures.empty());
    CHECK(rb.completed == 4);
    for (const auto& e : fs::directory_iterator(a / "kpi")) CHECK(slurp(e.path()) == slurp(b / "kpi" / e.path().filename()));
    const auto res = load_results(a);
    CHECK(res.size() == 2);
    CHECK(report_text(res) == slurp(a / "report.md"));
    fs::remove_all(a);
    fs::remove_all(b);
}

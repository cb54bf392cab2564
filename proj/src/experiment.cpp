#include "jamslice/experiment.hpp"

#include "jamslice/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <regex>
#include <set>
#include <sstream>

namespace jamslice {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool valid_name(const std::string& s) {
    static const std::regex re("[A-Za-z0-9][A-Za-z0-9._+-]*");
    return std::regex_match(s, re);
}

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw IoError("cannot write " + p.string());
    os << text;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

json read_json(const fs::path& p) {
    std::ifstream is(p);
    if (!is) throw IoError("cannot read " + p.string());
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw IoError(p.string() + ": " + e.what());
    }
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

std::string fmt(const std::optional<MeanStd>& m) {
    if (!m) return "-";
    return fmt(m->mean, 1) + " +/- " + fmt(m->std, 1);
}

std::vector<double> rewards(std::span<const TtiRecord> tt) {
    std::vector<double> out;
    out.reserve(tt.size());
    for (const auto& t : tt) out.push_back(t.reward);
    return out;
}

std::vector<double> latencies(std::span<const TtiRecord> tt) {
    std::vector<double> out;
    for (std::size_t i = tt.size() / 2; i < tt.size(); ++i)
        out.insert(out.end(), tt[i].urllc_latency_ms.begin(), tt[i].urllc_latency_ms.end());
    return out;
}

json digest_json(const RunDigest& d) {
    return json{{"seed", d.seed},
                {"config_hash", d.config_hash},
                {"expert", to_json(d.expert)},
                {"learner", to_json(d.learner)}};
}

} // namespace

// ---------------------------------------------------------------- manifest

ExperimentManifest manifest_from_json(const json& j) {
    std::vector<std::string> errs;
    ExperimentManifest m;
    if (!j.is_object()) throw ConfigError("manifest: top level must be an object");
    static const std::set<std::string> known{"name", "base", "seeds", "output", "scenarios", "recipes"};
    for (const auto& [k, v] : j.items())
        if (!known.contains(k)) errs.push_back("manifest." + k + ": unknown key");
    try {
        if (j.contains("name")) m.name = j.at("name").get<std::string>();
        if (!valid_name(m.name)) errs.push_back("manifest.name: use letters, digits, '.', '_', '+', '-'");
        if (j.contains("base")) {
            m.base = j.at("base");
            if (!m.base.is_object()) errs.push_back("manifest.base: must be an object");
        }
        if (j.contains("output")) m.output = j.at("output").get<std::string>();
        if (j.contains("seeds")) {
            const json& s = j.at("seeds");
            if (s.is_array()) {
                for (const auto& x : s) m.seeds.push_back(x.get<std::uint64_t>());
            } else if (s.is_object()) {
                for (const auto& [k, v] : s.items())
                    if (k != "first" && k != "count") errs.push_back("manifest.seeds." + k + ": unknown key");
                const auto first = s.value("first", std::uint64_t{1});
                const int count = s.value("count", 0);
                if (count < 1) errs.push_back("manifest.seeds.count: must be >= 1");
                for (int i = 0; i < count; ++i) m.seeds.push_back(first + static_cast<std::uint64_t>(i));
            } else {
                errs.push_back("manifest.seeds: expected a list or {first, count}");
            }
        } else {
            m.seeds = {1};
        }
        if (j.contains("scenarios")) {
            for (const auto& s : j.at("scenarios")) {
                ScenarioSpec sp;
                for (const auto& [k, v] : s.items())
                    if (k != "name" && k != "overrides") errs.push_back("manifest.scenarios[]." + k + ": unknown key");
                sp.name = s.at("name").get<std::string>();
                if (s.contains("overrides")) sp.overrides = s.at("overrides");
                if (!valid_name(sp.name))
                    errs.push_back("manifest.scenarios." + sp.name + ": invalid name");
                m.scenarios.push_back(std::move(sp));
            }
        }
        if (j.contains("recipes"))
            for (const auto& r : j.at("recipes")) m.recipes.push_back(r.get<std::string>());
    } catch (const json::exception& e) {
        errs.push_back(std::string("manifest: ") + e.what());
    }
    if (m.seeds.empty()) errs.push_back("manifest.seeds: at least one seed required");
    if (!errs.empty()) throw ConfigError(errs);
    return m;
}

json to_json(const ExperimentManifest& m) {
    json sc = json::array();
    for (const auto& s : m.scenarios) sc.push_back({{"name", s.name}, {"overrides", s.overrides}});
    return json{{"name", m.name}, {"base", m.base},       {"seeds", m.seeds},
                {"output", m.output}, {"scenarios", sc}, {"recipes", m.recipes}};
}

ExperimentManifest load_manifest(const fs::path& path) { return manifest_from_json(read_json(path)); }

std::vector<ScenarioSpec> expand_scenarios(const ExperimentManifest& m) {
    std::vector<ScenarioSpec> out;
    std::map<std::string, json> seen;
    std::vector<std::string> errs;
    auto add = [&](const ScenarioSpec& s, const std::string& origin) {
        auto it = seen.find(s.name);
        if (it == seen.end()) {
            seen.emplace(s.name, s.overrides);
            out.push_back(s);
        } else if (it->second != s.overrides) {
            errs.push_back("scenario " + s.name + " (" + origin + "): redefined with different overrides");
        }
    };
    std::set<std::string> names;
    for (const auto& s : m.scenarios) {
        if (!names.insert(s.name).second) errs.push_back("scenario " + s.name + ": duplicate name");
        add(s, "manifest");
    }
    for (const auto& r : m.recipes) {
        const Recipe* rc = find_recipe(r);
        if (!rc) {
            std::string allowed;
            for (const auto& x : recipes()) allowed += (allowed.empty() ? "" : ", ") + x.name;
            errs.push_back("recipe " + r + ": unknown (allowed: " + allowed + ")");
            continue;
        }
        for (const auto& s : rc->scenarios) add(s, "recipe " + r);
    }
    if (!errs.empty()) throw ConfigError(errs);
    return out;
}

std::vector<ScenarioConfig> scenario_configs(const ExperimentManifest& m, const ScenarioSpec& s,
                                             std::uint64_t seed_offset) {
    json o = m.base;
    o.merge_patch(s.overrides);
    o["name"] = s.name;
    ScenarioConfig c = config_with_overrides(ScenarioConfig{}, o);
    std::vector<ScenarioConfig> out;
    for (auto seed : m.seeds) {
        ScenarioConfig x = c;
        x.seed = seed + seed_offset;
        out.push_back(x);
    }
    return out;
}

std::vector<std::string> validate_manifest(const ExperimentManifest& m) {
    std::vector<std::string> errs;
    std::vector<ScenarioSpec> specs;
    try {
        specs = expand_scenarios(m);
    } catch (const ConfigError& e) {
        for (const auto& x : e.issues()) errs.push_back(x);
    }
    if (specs.empty() && errs.empty()) errs.push_back("manifest: no scenarios and no recipes");
    for (const auto& s : specs) {
        try {
            const auto cfgs = scenario_configs(m, s);
            for (const auto& x : validate(cfgs.front())) errs.push_back(s.name + ": " + x);
        } catch (const ConfigError& e) {
            for (const auto& x : e.issues()) errs.push_back(s.name + ": " + x);
        }
    }
    return errs;
}

fs::path output_dir(const ExperimentManifest& m, const std::optional<std::string>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("JAMSLICE_OUT"); env && *env) return fs::path(env) / m.name;
    return m.output.empty() ? fs::path("results") / m.name : fs::path(m.output);
}

// ---------------------------------------------------------------- digests

RunDigest digest(const RunRecord& r) {
    RunDigest d;
    d.seed = r.seed;
    d.config_hash = r.config_hash;
    d.expert = summarize(r, Phase::Expert);
    d.learner = summarize(r, Phase::Learner);
    d.expert_reward = rewards(r.phase(Phase::Expert));
    d.learner_reward = rewards(r.phase(Phase::Learner));
    d.expert_latency_ms = latencies(r.phase(Phase::Expert));
    d.learner_latency_ms = latencies(r.phase(Phase::Learner));
    return d;
}

ScenarioRuns ScenarioResult::kpis(Phase p) const {
    ScenarioRuns s;
    s.config = config;
    for (const auto& d : runs) s.runs.push_back(p == Phase::Expert ? d.expert : d.learner);
    return s;
}

// ---------------------------------------------------------------- recipes

std::string scenario_name(AttackKind a, MitigationKind m, const std::string& suffix) {
    std::string s = to_string(a);
    if (m != MitigationKind::None) s += std::string("+") + to_string(m);
    return suffix.empty() ? s : suffix + "." + s;
}

json scenario_overrides(AttackKind a, MitigationKind m) {
    return json{{"attack", {{"kind", to_string(a)}}}, {"mitigation", {{"kind", to_string(m)}}}};
}

namespace {

using Pair = std::pair<AttackKind, MitigationKind>;

ScenarioSpec spec(AttackKind a, MitigationKind m, const std::string& suffix = "", json extra = json::object()) {
    json o = scenario_overrides(a, m);
    o.merge_patch(extra);
    return {scenario_name(a, m, suffix), o};
}

const std::vector<Pair> kBasicAttacks{{AttackKind::None, MitigationKind::None},
                                      {AttackKind::Cja, MitigationKind::None},
                                      {AttackKind::Rja, MitigationKind::None},
                                      {AttackKind::DrlJa, MitigationKind::None}};

const std::vector<Pair> kUeSeries{{AttackKind::None, MitigationKind::None},
                                  {AttackKind::Cja, MitigationKind::None},
                                  {AttackKind::DrlJa, MitigationKind::None},
                                  {AttackKind::DrlJa, MitigationKind::Suspend},
                                  {AttackKind::DrlJa, MitigationKind::DecoyDrl}};

const std::vector<Pair> kNetSeries{{AttackKind::DrlJa, MitigationKind::None},
                                   {AttackKind::DrlJa, MitigationKind::Suspend},
                                   {AttackKind::DrlJa, MitigationKind::DecoyDrl}};

const std::vector<int> kUeCounts{10, 20, 30, 40};
const std::vector<int> kHidden{10, 20, 30, 40};
const std::vector<int> kLayers{1, 2, 3};

std::string ue_suffix(int n) { return "ues" + std::to_string(n); }
std::string hidden_suffix(int h) { return h == JammerParams{}.hidden ? "" : "h" + std::to_string(h); }
std::string layer_suffix(int l) { return l == JammerParams{}.layers ? "" : "l" + std::to_string(l); }

std::vector<ScenarioSpec> sweep_specs() {
    std::vector<ScenarioSpec> out;
    for (int n : kUeCounts)
        for (auto [a, m] : kUeSeries)
            out.push_back(spec(a, m, ue_suffix(n), {{"topology", {{"embb_ues", n}, {"urllc_ues", n}}}}));
    out.push_back(spec(AttackKind::None, MitigationKind::None));
    for (int h : kHidden)
        for (auto [a, m] : kNetSeries)
            out.push_back(h == JammerParams{}.hidden ? spec(a, m)
                                                     : spec(a, m, hidden_suffix(h), {{"attack", {{"hidden", h}}}}));
    for (int l : kLayers)
        for (auto [a, m] : kNetSeries)
            out.push_back(l == JammerParams{}.layers ? spec(a, m)
                                                     : spec(a, m, layer_suffix(l), {{"attack", {{"layers", l}}}}));
    // Recipes may list a scenario twice; keep the first.
    std::vector<ScenarioSpec> uniq;
    std::set<std::string> seen;
    for (auto& s : out)
        if (seen.insert(s.name).second) uniq.push_back(std::move(s));
    return uniq;
}

const ScenarioResult* find(const ResultSet& r, const std::string& name) {
    auto it = r.find(name);
    return it == r.end() || it->second.runs.empty() ? nullptr : &it->second;
}

double kpi_of(const KpiSummary& k, KpiKind kind) {
    return kind == KpiKind::Throughput ? k.throughput_mbps : k.latency_ms;
}

std::optional<MeanStd> seed_mean(const ScenarioResult* s, Phase p, KpiKind kind) {
    if (!s) return std::nullopt;
    std::vector<double> xs;
    for (const auto& d : s->runs) xs.push_back(kpi_of(p == Phase::Expert ? d.expert : d.learner, kind));
    return mean_std(xs);
}

void emit_fig4(const ResultSet& res, const fs::path& dir) {
    constexpr int kStride = 10;
    json out = json::object();
    std::ostringstream csv;
    csv << "phase,tti";
    std::vector<std::pair<std::string, std::array<std::vector<double>, 2>>> series;
    for (auto [a, m] : kBasicAttacks) {
        const ScenarioResult* s = find(res, scenario_name(a, m));
        if (!s) continue;
        std::array<std::vector<double>, 2> mean;
        json conv = json::array();
        for (int ph = 0; ph < 2; ++ph) {
            for (const auto& d : s->runs) {
                const auto e = ema(ph == 0 ? d.expert_reward : d.learner_reward, ConvergenceRule{}.window);
                if (mean[ph].empty()) mean[ph].assign(e.size(), 0.0);
                for (std::size_t i = 0; i < e.size() && i < mean[ph].size(); ++i)
                    mean[ph][i] += e[i] / static_cast<double>(s->runs.size());
            }
        }
        for (const auto& d : s->runs) {
            auto opt = [](const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); };
            conv.push_back({{"seed", d.seed},
                            {"expert", opt(d.learner.expert_convergence)},
                            {"learner", opt(d.learner.learner_convergence)}});
        }
        out[s->name] = {{"expert_reward_ema", mean[0]}, {"learner_reward_ema", mean[1]}, {"convergence", conv}};
        csv << "," << s->name;
        series.emplace_back(s->name, std::move(mean));
    }
    csv << "\n";
    for (int ph = 0; ph < 2; ++ph) {
        std::size_t len = 0;
        for (const auto& [n, m] : series) len = std::max(len, m[ph].size());
        for (std::size_t i = 0; i < len; i += kStride) {
            csv << (ph == 0 ? "expert" : "learner") << "," << i;
            for (const auto& [n, m] : series) csv << "," << (i < m[ph].size() ? fmt(m[ph][i], 6) : "");
            csv << "\n";
        }
    }
    write_json(dir / "fig4.json", out);
    write_text(dir / "fig4.csv", csv.str());
}

void emit_fig5(const ResultSet& res, const fs::path& dir) {
    json out = json::object();
    std::ostringstream csv;
    csv << "phase,scenario,quantile,latency_ms\n";
    for (auto [a, m] : kBasicAttacks) {
        const ScenarioResult* s = find(res, scenario_name(a, m));
        if (!s) continue;
        json entry = json::object();
        for (int ph = 0; ph < 2; ++ph) {
            std::vector<double> pooled;
            for (const auto& d : s->runs) {
                const auto& v = ph == 0 ? d.expert_latency_ms : d.learner_latency_ms;
                pooled.insert(pooled.end(), v.begin(), v.end());
            }
            const char* phase = ph == 0 ? "expert" : "learner";
            if (pooled.empty()) {
                entry[phase] = nullptr;
                continue;
            }
            const Ecdf f(pooled);
            json pts = json::array();
            for (int i = 1; i <= 100; ++i) {
                const double q = i / 100.0;
                const double x = f.quantile(q);
                pts.push_back({x, f(x)});
                csv << phase << "," << s->name << "," << fmt(q, 2) << "," << fmt(x, 6) << "\n";
            }
            entry[phase] = {{"samples", pooled.size()}, {"points", pts}};
        }
        out[s->name] = entry;
    }
    write_json(dir / "fig5.json", out);
    write_text(dir / "fig5.csv", csv.str());
}

void emit_sweep(const ResultSet& res, const fs::path& dir, const std::string& name, Phase phase, KpiKind kind) {
    json out{{"phase", phase == Phase::Expert ? "expert" : "learner"}, {"kpi", to_string(kind)}};
    std::ostringstream txt;
    txt << name << ": " << (phase == Phase::Expert ? "expert" : "learner") << " "
        << (kind == KpiKind::Throughput ? "eMBB throughput (Mbps)" : "uRLLC latency (ms)") << "\n";
    auto panel = [&](const std::string& title, const std::vector<int>& xs, const std::vector<Pair>& lines,
                     const std::function<std::string(int, Pair)>& scenario) {
        json p{{"x", xs}, {"series", json::object()}};
        txt << "\n" << title << "\n" << std::setw(22) << "series";
        for (int x : xs) txt << std::setw(16) << x;
        txt << "\n";
        for (auto pr : lines) {
            const std::string label = scenario_name(pr.first, pr.second);
            json mean = json::array(), sd = json::array();
            txt << std::setw(22) << label;
            for (int x : xs) {
                const auto v = seed_mean(find(res, scenario(x, pr)), phase, kind);
                mean.push_back(v ? json(v->mean) : json(nullptr));
                sd.push_back(v ? json(v->std) : json(nullptr));
                txt << std::setw(16) << (v ? fmt(v->mean) + "+/-" + fmt(v->std, 2) : "-");
            }
            txt << "\n";
            p["series"][label] = {{"mean", mean}, {"std", sd}};
        }
        out[title] = p;
    };
    panel("ues", kUeCounts, kUeSeries, [](int n, Pair p) { return scenario_name(p.first, p.second, ue_suffix(n)); });
    panel("hidden_units", kHidden, kNetSeries,
          [](int h, Pair p) { return scenario_name(p.first, p.second, hidden_suffix(h)); });
    panel("hidden_layers", kLayers, kNetSeries,
          [](int l, Pair p) { return scenario_name(p.first, p.second, layer_suffix(l)); });
    write_json(dir / (name + ".json"), out);
    write_text(dir / (name + ".txt"), txt.str());
}

RunGroups plain_groups(const ResultSet& res, Phase p) {
    RunGroups g;
    for (auto a : {AttackKind::None, AttackKind::Cja, AttackKind::Rja, AttackKind::DrlJa, AttackKind::Fnn})
        for (auto m : {MitigationKind::None, MitigationKind::Suspend, MitigationKind::DecoyDrl, MitigationKind::DecoyFnn})
            if (const ScenarioResult* s = find(res, scenario_name(a, m))) g[group_key(a, m)] = s->kpis(p);
    return g;
}

void emit_table(const ResultSet& res, const fs::path& dir, const std::string& name, TableKind kind) {
    const ComparisonTable t = comparison_table(plain_groups(res, Phase::Learner), kind);
    write_json(dir / (name + ".json"), t.to_json());
    write_text(dir / (name + ".txt"), t.to_text());
}

std::vector<Recipe> build_recipes() {
    std::vector<Recipe> r;
    std::vector<ScenarioSpec> basic;
    for (auto [a, m] : kBasicAttacks) basic.push_back(spec(a, m));
    r.push_back({"fig4", "reward EMA per phase and convergence points under no attack, CJA, RJA, DRL-JA", basic,
                 emit_fig4});
    r.push_back({"fig5", "uRLLC latency eCDF per phase under no attack, CJA, RJA, DRL-JA", basic, emit_fig5});
    const auto sweeps = sweep_specs();
    r.push_back({"fig6", "expert eMBB throughput vs UEs, DRL-JA hidden units and hidden layers", sweeps,
                 [](const ResultSet& x, const fs::path& d) { emit_sweep(x, d, "fig6", Phase::Expert, KpiKind::Throughput); }});
    r.push_back({"fig7", "expert uRLLC latency vs UEs, DRL-JA hidden units and hidden layers", sweeps,
                 [](const ResultSet& x, const fs::path& d) { emit_sweep(x, d, "fig7", Phase::Expert, KpiKind::Latency); }});
    r.push_back({"fig8", "learner eMBB throughput vs UEs, DRL-JA hidden units and hidden layers", sweeps,
                 [](const ResultSet& x, const fs::path& d) { emit_sweep(x, d, "fig8", Phase::Learner, KpiKind::Throughput); }});
    r.push_back({"fig9", "learner uRLLC latency vs UEs, DRL-JA hidden units and hidden layers", sweeps,
                 [](const ResultSet& x, const fs::path& d) { emit_sweep(x, d, "fig9", Phase::Learner, KpiKind::Latency); }});
    r.push_back({"table5", "FNN and DRL-JA degradation of throughput and latency",
                 {spec(AttackKind::None, MitigationKind::None), spec(AttackKind::Fnn, MitigationKind::None),
                  spec(AttackKind::DrlJa, MitigationKind::None)},
                 [](const ResultSet& x, const fs::path& d) { emit_table(x, d, "table5", TableKind::AttackerDegradation); }});
    std::vector<ScenarioSpec> matrix;
    for (auto a : {AttackKind::Fnn, AttackKind::DrlJa})
        for (auto m : {MitigationKind::None, MitigationKind::DecoyFnn, MitigationKind::DecoyDrl}) matrix.push_back(spec(a, m));
    r.push_back({"table6", "throughput recovery, attacker net vs decoy net", matrix,
                 [](const ResultSet& x, const fs::path& d) { emit_table(x, d, "table6", TableKind::MitigationThroughput); }});
    r.push_back({"table7", "latency recovery, attacker net vs decoy net", matrix,
                 [](const ResultSet& x, const fs::path& d) { emit_table(x, d, "table7", TableKind::MitigationLatency); }});
    return r;
}

} // namespace

const std::vector<Recipe>& recipes() {
    static const std::vector<Recipe> r = build_recipes();
    return r;
}

const Recipe* find_recipe(const std::string& name) {
    for (const auto& r : recipes())
        if (r.name == name) return &r;
    return nullptr;
}

// ---------------------------------------------------------------- running

RunOutcome run_experiment(const ExperimentManifest& m, const RunOptions& opt) {
    const auto specs = expand_scenarios(m);
    if (const auto errs = validate_manifest(m); !errs.empty()) throw ConfigError(errs);
    auto log = [&](const std::string& s) {
        if (opt.log) opt.log(s);
    };
    fs::create_directories(opt.out);
    ExperimentManifest resolved = m;
    for (auto& s : resolved.seeds) s += opt.seed_offset;
    write_json(opt.out / "manifest.json", to_json(resolved));

    RunOutcome outcome;
    ResultSet results;
    for (const auto& s : specs) {
        const auto cfgs = scenario_configs(m, s, opt.seed_offset);
        log("running " + s.name + " (" + std::to_string(cfgs.size()) + " seeds)");
        auto items = run_batch(cfgs, opt.parallel);
        ScenarioResult sr;
        sr.name = s.name;
        ScenarioConfig view = cfgs.front();
        view.seed = 0;
        sr.config = to_json(view);
        json kpi_runs = json::array();
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (!items[i].ok) {
                outcome.failures.push_back(s.name + " seed " + std::to_string(cfgs[i].seed) + ": " + items[i].error);
                continue;
            }
            const auto stem = opt.out / "runs" / s.name / ("seed-" + std::to_string(cfgs[i].seed));
            fs::create_directories(stem.parent_path());
            write_record(items[i].record, stem.string() + ".summary.json", stem.string() + ".ttis.jsonl");
            sr.runs.push_back(digest(items[i].record));
            kpi_runs.push_back(digest_json(sr.runs.back()));
            ++outcome.completed;
            items[i].record = RunRecord{};
        }
        write_json(opt.out / "kpi" / (s.name + ".json"),
                   json{{"scenario", s.name}, {"config", sr.config}, {"runs", kpi_runs}});
        results.emplace(s.name, std::move(sr));
    }
    for (const auto& r : m.recipes) {
        log("recipe " + r);
        find_recipe(r)->emit(results, opt.out / "recipes");
    }
    write_text(opt.out / "report.md", report_text(results));
    return outcome;
}

ResultSet load_results(const fs::path& dir) {
    const fs::path kdir = dir / "kpi";
    if (!fs::is_directory(kdir)) throw IoError(dir.string() + ": no kpi directory; run an experiment first");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(kdir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError(kdir.string() + ": no KPI files");
    ResultSet out;
    std::vector<std::string> errs;
    for (const auto& f : files) {
        const json j = read_json(f);
        ScenarioResult sr;
        sr.name = j.at("scenario").get<std::string>();
        sr.config = j.at("config");
        for (const auto& r : j.at("runs")) {
            RunDigest d;
            d.seed = r.at("seed").get<std::uint64_t>();
            d.config_hash = r.at("config_hash").get<std::string>();
            d.expert = kpi_from_json(r.at("expert"));
            d.learner = kpi_from_json(r.at("learner"));
            const fs::path summary = dir / "runs" / sr.name / ("seed-" + std::to_string(d.seed) + ".summary.json");
            if (!fs::exists(summary)) {
                errs.push_back(sr.name + " seed " + std::to_string(d.seed) + ": run summary missing");
                continue;
            }
            const json s = read_json(summary);
            if (s.value("config_hash", std::string()) != d.config_hash)
                errs.push_back(sr.name + " seed " + std::to_string(d.seed) + ": config hash differs from run summary");
            if (d.expert.config_hash != d.config_hash || d.learner.config_hash != d.config_hash)
                errs.push_back(sr.name + " seed " + std::to_string(d.seed) + ": KPI hash differs from run hash");
            sr.runs.push_back(std::move(d));
        }
        out.emplace(sr.name, std::move(sr));
    }
    if (!errs.empty()) throw IoError(errs.front() + (errs.size() > 1 ? " (and more)" : ""));
    return out;
}

// ---------------------------------------------------------------- checks

namespace {

struct Pairing {
    const ScenarioResult* current = nullptr;
    const ScenarioResult* reference = nullptr;
    std::string problem;
};

Pairing pair_up(const ResultSet& res, const std::string& cur, const std::string& ref) {
    Pairing p;
    p.current = find(res, cur);
    p.reference = find(res, ref);
    if (!p.current || !p.reference) {
        p.problem = "missing scenario " + std::string(!p.current ? cur : ref);
        return p;
    }
    try {
        require_comparable(p.current->config, p.reference->config);
    } catch (const ConfigError& e) {
        p.problem = cur + " vs " + ref + ": " + e.what();
    }
    return p;
}

std::optional<MeanStd> deg(const Pairing& p, KpiKind k) {
    if (!p.problem.empty()) return std::nullopt;
    return paired_degradation(p.current->kpis(Phase::Learner), p.reference->kpis(Phase::Learner), k);
}

std::optional<MeanStd> rec(const Pairing& p, KpiKind k) {
    if (!p.problem.empty()) return std::nullopt;
    return paired_recovery(p.current->kpis(Phase::Learner), p.reference->kpis(Phase::Learner), k);
}

Check band(const std::string& name, const std::optional<MeanStd>& v, double lo, double hi, const std::string& problem) {
    Check c;
    c.name = name;
    if (!v) {
        c.detail = problem.empty() ? "no paired seeds" : problem;
        return c;
    }
    c.evaluated = true;
    c.pass = v->mean >= lo && v->mean <= hi;
    c.detail = fmt(v->mean, 1) + "% (accept " + fmt(lo, 0) + ".." + fmt(hi, 0) + ", " + std::to_string(v->n) + " seeds)";
    return c;
}

} // namespace

std::vector<Check> headline_checks(const ResultSet& res) {
    const std::string none = scenario_name(AttackKind::None, MitigationKind::None);
    const std::string drl = scenario_name(AttackKind::DrlJa, MitigationKind::None);
    const std::string fnn = scenario_name(AttackKind::Fnn, MitigationKind::None);
    const std::string cja = scenario_name(AttackKind::Cja, MitigationKind::None);
    const std::string rja = scenario_name(AttackKind::Rja, MitigationKind::None);
    const std::string decoy = scenario_name(AttackKind::DrlJa, MitigationKind::DecoyDrl);
    const std::string suspend = scenario_name(AttackKind::DrlJa, MitigationKind::Suspend);
    std::vector<Check> out;
    const auto pd = pair_up(res, drl, none);
    out.push_back(band("drl-ja throughput degradation 50% target", deg(pd, KpiKind::Throughput), 35, 65, pd.problem));
    out.push_back(band("drl-ja latency increase 60% target", deg(pd, KpiKind::Latency), 45, 75, pd.problem));
    const auto pf = pair_up(res, fnn, none);
    out.push_back(band("fnn throughput degradation 27% target", deg(pf, KpiKind::Throughput), 12, 42, pf.problem));
    out.push_back(band("fnn latency increase 36% target", deg(pf, KpiKind::Latency), 21, 51, pf.problem));
    const auto pm = pair_up(res, decoy, drl);
    const auto rt = rec(pm, KpiKind::Throughput), rl = rec(pm, KpiKind::Latency);
    out.push_back(band("decoy-drl throughput recovery 80% target", rt, 65, 95, pm.problem));
    out.push_back(band("decoy-drl latency recovery 70% target", rl, 55, 85, pm.problem));
    {
        const auto ps = pair_up(res, suspend, drl);
        Check c;
        c.name = "suspend-learning recovers at most half of decoy-drl";
        const auto st = rec(ps, KpiKind::Throughput), sl = rec(ps, KpiKind::Latency);
        if (st && sl && rt && rl) {
            c.evaluated = true;
            c.pass = st->mean <= 0.5 * rt->mean && sl->mean <= 0.5 * rl->mean;
            c.detail = "throughput " + fmt(st->mean, 1) + "% vs " + fmt(rt->mean, 1) + "%, latency " + fmt(sl->mean, 1) +
                       "% vs " + fmt(rl->mean, 1) + "%";
        } else {
            c.detail = !ps.problem.empty() ? ps.problem : !pm.problem.empty() ? pm.problem : "no paired seeds";
        }
        out.push_back(c);
    }
    for (auto k : {KpiKind::Throughput, KpiKind::Latency}) {
        Check c;
        c.name = std::string("attack ordering drl-ja > cja > rja on ") + to_string(k);
        const auto a = pair_up(res, drl, none), b = pair_up(res, cja, none), r = pair_up(res, rja, none);
        const auto da = deg(a, k), db = deg(b, k), dr = deg(r, k);
        if (da && db && dr) {
            c.evaluated = true;
            c.pass = da->mean > db->mean && db->mean > dr->mean;
            c.detail = fmt(da->mean, 1) + "% / " + fmt(db->mean, 1) + "% / " + fmt(dr->mean, 1) + "%";
        } else {
            c.detail = !a.problem.empty() ? a.problem : !b.problem.empty() ? b.problem : r.problem;
        }
        out.push_back(c);
    }
    return out;
}

std::string report_text(const ResultSet& res) {
    std::ostringstream os;
    os << "# Experiment report\n\n";
    os << "KPIs are seed means over the second half of each phase. Throughput is eMBB goodput in Mbps; "
          "latency is the mean delivered uRLLC latency in ms.\n\n";
    os << "## Scenarios\n\n";
    os << "| scenario | attack | mitigation | seeds | expert tput | expert lat | learner tput | learner lat | "
          "learner p95 | uRLLC drop | jam hit |\n";
    os << "|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& [name, s] : res) {
        std::vector<double> et, el, lt, ll, p95, drop, hit;
        for (const auto& d : s.runs) {
            et.push_back(d.expert.throughput_mbps);
            el.push_back(d.expert.latency_ms);
            lt.push_back(d.learner.throughput_mbps);
            ll.push_back(d.learner.latency_ms);
            p95.push_back(d.learner.latency_p95_ms);
            drop.push_back(d.learner.drop_rate);
            hit.push_back(d.learner.jam_hit_rate);
        }
        os << "| " << name << " | " << s.config["attack"].value("kind", "?") << " | "
           << s.config["mitigation"].value("kind", "?") << " | " << s.runs.size() << " | " << fmt(mean_std(et).mean)
           << " | " << fmt(mean_std(el).mean) << " | " << fmt(mean_std(lt).mean) << " | " << fmt(mean_std(ll).mean)
           << " | " << fmt(mean_std(p95).mean) << " | " << fmt(mean_std(drop).mean) << " | " << fmt(mean_std(hit).mean)
           << " |\n";
    }

    os << "\n## Degradation vs the comparable no-attack scenario (learner phase)\n\n";
    os << "| scenario | baseline | throughput % | latency % |\n|---|---|---|---|\n";
    std::vector<std::string> missing;
    for (const auto& [name, s] : res) {
        if (s.config["attack"].value("kind", "none") == "none" || s.config["mitigation"].value("kind", "none") != "none")
            continue;
        const ScenarioResult* base = nullptr;
        for (const auto& [bn, b] : res) {
            if (b.config["attack"].value("kind", "") != "none" || b.config["mitigation"].value("kind", "") != "none") continue;
            try {
                require_comparable(s.config, b.config);
                base = &b;
                break;
            } catch (const ConfigError&) {
            }
        }
        if (!base) {
            missing.push_back(name + ": no comparable no-attack baseline");
            continue;
        }
        const auto a = s.kpis(Phase::Learner), b = base->kpis(Phase::Learner);
        os << "| " << name << " | " << base->name << " | " << fmt(paired_degradation(a, b, KpiKind::Throughput)) << " | "
           << fmt(paired_degradation(a, b, KpiKind::Latency)) << " |\n";
    }

    os << "\n## Recovery vs the same attack without mitigation (learner phase)\n\n";
    os << "| scenario | attacked | throughput % | latency % |\n|---|---|---|---|\n";
    for (const auto& [name, s] : res) {
        const std::string attack = s.config["attack"].value("kind", "none");
        if (s.config["mitigation"].value("kind", "none") == "none" || attack == "none") continue;
        const ScenarioResult* ref = nullptr;
        for (const auto& [rn, r] : res) {
            if (r.config["attack"].value("kind", "") != attack || r.config["mitigation"].value("kind", "") != "none") continue;
            try {
                require_comparable(s.config, r.config);
                ref = &r;
                break;
            } catch (const ConfigError&) {
            }
        }
        if (!ref) {
            missing.push_back(name + ": no comparable unmitigated scenario");
            continue;
        }
        const auto a = s.kpis(Phase::Learner), b = ref->kpis(Phase::Learner);
        os << "| " << name << " | " << ref->name << " | " << fmt(paired_recovery(a, b, KpiKind::Throughput)) << " | "
           << fmt(paired_recovery(a, b, KpiKind::Latency)) << " |\n";
    }
    if (!missing.empty()) {
        os << "\nMissing references:\n\n";
        for (const auto& m : missing) os << "- " << m << "\n";
    }

    os << "\n## Headline checks\n\n";
    for (const auto& c : headline_checks(res))
        os << "- " << (c.evaluated ? (c.pass ? "PASS" : "FAIL") : "SKIP") << " " << c.name << ": " << c.detail << "\n";
    return os.str();
}

} // namespace jamslice

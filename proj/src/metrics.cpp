#include "jamslice/metrics.hpp"

#include "jamslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace jamslice {

using nlohmann::json;

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw DomainError("ecdf: at least one sample is required");
    for (double x : sorted_)
        if (std::isnan(x)) throw DomainError("ecdf: NaN sample");
    std::sort(sorted_.begin(), sorted_.end());
    const auto n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
        if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
        points_.push_back({sorted_[i], static_cast<double>(i + 1) / n});
    }
}

double Ecdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double Ecdf::quantile(double q) const {
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("ecdf: quantile must lie in (0, 1]");
    const auto n = static_cast<double>(sorted_.size());
    auto k = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    k = std::clamp<std::size_t>(k, 1, sorted_.size());
    return sorted_[k - 1];
}

const char* to_string(KpiKind k) { return k == KpiKind::Throughput ? "throughput" : "latency"; }

double degradation(double current, double baseline, KpiKind kind) {
    if (!(baseline > 0.0)) throw DomainError("degradation: baseline must be > 0");
    return kind == KpiKind::Throughput ? (baseline - current) / baseline * 100.0
                                       : (current - baseline) / baseline * 100.0;
}

double recovery(double mitigated, double attacked, KpiKind kind) {
    if (!(attacked > 0.0)) throw DomainError("recovery: attacked KPI must be > 0");
    return kind == KpiKind::Throughput ? (mitigated - attacked) / attacked * 100.0
                                       : (attacked - mitigated) / attacked * 100.0;
}

std::vector<double> ema(std::span<const double> series, int window) {
    if (window < 1) throw DomainError("ema: window must be >= 1");
    std::vector<double> out(series.size());
    const double a = 2.0 / (window + 1.0);
    for (std::size_t i = 0; i < series.size(); ++i)
        out[i] = i == 0 ? series[0] : a * series[i] + (1.0 - a) * out[i - 1];
    return out;
}

std::optional<std::int64_t> convergence_point(std::span<const double> series, const ConvergenceRule& rule) {
    if (rule.window < 1 || rule.hold < 1) throw DomainError("convergence: window and hold must be >= 1");
    const auto w = static_cast<std::size_t>(rule.window);
    if (series.size() <= w) return std::nullopt;
    const auto e = ema(series, rule.window);
    std::size_t run = 0;
    for (std::size_t t = w; t < e.size(); ++t) {
        const double slope = (e[t] - e[t - w]) / static_cast<double>(w);
        run = std::abs(slope) < rule.tolerance ? run + 1 : 0;
        if (run == static_cast<std::size_t>(rule.hold)) return static_cast<std::int64_t>(t + 1 - run);
    }
    return std::nullopt;
}

MeanStd mean_std(std::span<const double> xs) {
    MeanStd m;
    m.n = static_cast<int>(xs.size());
    if (xs.empty()) return m;
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() < 2) return m;
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    return m;
}

KpiSummary summarize(const RunRecord& r, Phase phase, const ConvergenceRule& rule) {
    KpiSummary k;
    k.name = r.name;
    k.config_hash = r.config_hash;
    k.seed = r.seed;
    if (r.config.contains("attack")) k.attack = r.config["attack"].value("kind", "none");
    if (r.config.contains("mitigation")) k.mitigation = r.config["mitigation"].value("kind", "none");

    const auto tt = r.phase(phase);
    const std::size_t from = tt.size() / 2;
    std::vector<double> lat;
    double tput = 0.0, reward = 0.0;
    std::int64_t jammed = 0, hits = 0;
    for (std::size_t i = from; i < tt.size(); ++i) {
        tput += tt[i].embb_goodput_mbps;
        reward += tt[i].reward;
        lat.insert(lat.end(), tt[i].urllc_latency_ms.begin(), tt[i].urllc_latency_ms.end());
        jammed += static_cast<std::int64_t>(tt[i].jammed.size());
        hits += tt[i].jam_hits;
    }
    const std::size_t n = tt.size() - from;
    if (n > 0) {
        k.throughput_mbps = tput / static_cast<double>(n);
        k.mean_reward = reward / static_cast<double>(n);
    }
    if (!lat.empty()) {
        k.latency_ms = std::accumulate(lat.begin(), lat.end(), 0.0) / static_cast<double>(lat.size());
        const Ecdf f(lat);
        k.latency_p50_ms = f.quantile(0.5);
        k.latency_p95_ms = f.quantile(0.95);
        k.latency_p99_ms = f.quantile(0.99);
    }
    k.latency_samples = static_cast<std::int64_t>(lat.size());
    k.jam_hit_rate = jammed > 0 ? static_cast<double>(hits) / static_cast<double>(jammed) : 0.0;
    const PacketLedger& l = phase == Phase::Expert ? r.expert_urllc : r.learner_urllc;
    if (l.arrived > 0)
        k.drop_rate = static_cast<double>(l.dropped_harq + l.dropped_overflow) / static_cast<double>(l.arrived);

    auto conv = [&](Phase p) -> std::optional<std::int64_t> {
        const auto s = r.phase(p);
        std::vector<double> rw;
        rw.reserve(s.size());
        for (const auto& t : s) rw.push_back(t.reward);
        return convergence_point(rw, rule);
    };
    k.expert_convergence = conv(Phase::Expert);
    k.learner_convergence = conv(Phase::Learner);
    return k;
}

namespace {

json opt_json(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::int64_t> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<std::int64_t>();
}

json ms_json(const std::optional<MeanStd>& m) {
    if (!m) return nullptr;
    return json{{"mean", m->mean}, {"std", m->std}, {"n", m->n}};
}

} // namespace

json to_json(const KpiSummary& k) {
    return json{
        {"name", k.name},
        {"config_hash", k.config_hash},
        {"seed", k.seed},
        {"attack", k.attack},
        {"mitigation", k.mitigation},
        {"throughput_mbps", k.throughput_mbps},
        {"latency_ms", k.latency_ms},
        {"latency_p50_ms", k.latency_p50_ms},
        {"latency_p95_ms", k.latency_p95_ms},
        {"latency_p99_ms", k.latency_p99_ms},
        {"latency_samples", k.latency_samples},
        {"drop_rate", k.drop_rate},
        {"expert_convergence", opt_json(k.expert_convergence)},
        {"learner_convergence", opt_json(k.learner_convergence)},
        {"jam_hit_rate", k.jam_hit_rate},
        {"mean_reward", k.mean_reward},
    };
}

KpiSummary kpi_from_json(const json& j) {
    try {
        KpiSummary k;
        k.name = j.at("name").get<std::string>();
        k.config_hash = j.at("config_hash").get<std::string>();
        k.seed = j.at("seed").get<std::uint64_t>();
        k.attack = j.at("attack").get<std::string>();
        k.mitigation = j.at("mitigation").get<std::string>();
        k.throughput_mbps = j.at("throughput_mbps").get<double>();
        k.latency_ms = j.at("latency_ms").get<double>();
        k.latency_p50_ms = j.at("latency_p50_ms").get<double>();
        k.latency_p95_ms = j.at("latency_p95_ms").get<double>();
        k.latency_p99_ms = j.at("latency_p99_ms").get<double>();
        k.latency_samples = j.at("latency_samples").get<std::int64_t>();
        k.drop_rate = j.at("drop_rate").get<double>();
        k.expert_convergence = opt_from(j.at("expert_convergence"));
        k.learner_convergence = opt_from(j.at("learner_convergence"));
        k.jam_hit_rate = j.at("jam_hit_rate").get<double>();
        k.mean_reward = j.at("mean_reward").get<double>();
        return k;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("kpi summary: ") + e.what());
    }
}

void require_comparable(const json& a, const json& b) {
    auto kind = [](const json& c, const char* section) {
        return c.contains(section) ? c[section].value("kind", std::string("none")) : std::string("none");
    };
    // A section whose kind is none on either side carries no effect there.
    const bool drop_attack = kind(a, "attack") == "none" || kind(b, "attack") == "none";
    const bool drop_mitigation = kind(a, "mitigation") == "none" || kind(b, "mitigation") == "none";
    auto strip = [&](json c) {
        c.erase("name");
        c.erase("seed");
        if (drop_attack) c.erase("attack");
        else if (c.contains("attack")) c["attack"].erase("kind");
        if (drop_mitigation) c.erase("mitigation");
        else if (c.contains("mitigation")) c["mitigation"].erase("kind");
        return c;
    };
    const json x = strip(a), y = strip(b);
    if (x == y) return;
    std::vector<std::string> issues;
    const json diff = json::diff(x, y);
    for (const auto& d : diff) issues.push_back("config mismatch at " + d.value("path", std::string("?")));
    throw ConfigError(issues);
}

std::string group_key(AttackKind a, MitigationKind m) { return std::string(to_string(a)) + "/" + to_string(m); }

namespace {

double kpi(const KpiSummary& k, KpiKind kind) { return kind == KpiKind::Throughput ? k.throughput_mbps : k.latency_ms; }

template <class F>
std::optional<MeanStd> paired(const ScenarioRuns& a, const ScenarioRuns& b, F f) {
    require_comparable(a.config, b.config);
    std::vector<double> xs;
    for (const auto& x : a.runs)
        for (const auto& y : b.runs)
            if (x.seed == y.seed) {
                if (auto v = f(x, y)) xs.push_back(*v);
            }
    if (xs.empty()) return std::nullopt;
    return mean_std(xs);
}

} // namespace

std::optional<MeanStd> paired_degradation(const ScenarioRuns& current, const ScenarioRuns& reference, KpiKind kind) {
    return paired(current, reference, [&](const KpiSummary& c, const KpiSummary& r) -> std::optional<double> {
        if (!(kpi(r, kind) > 0.0)) return std::nullopt;
        return degradation(kpi(c, kind), kpi(r, kind), kind);
    });
}

std::optional<MeanStd> paired_recovery(const ScenarioRuns& mitigated, const ScenarioRuns& attacked, KpiKind kind) {
    return paired(mitigated, attacked, [&](const KpiSummary& m, const KpiSummary& a) -> std::optional<double> {
        if (!(kpi(a, kind) > 0.0)) return std::nullopt;
        return recovery(kpi(m, kind), kpi(a, kind), kind);
    });
}

json ComparisonTable::to_json() const {
    json cells_j = json::array();
    for (const auto& row : cells) {
        json r = json::array();
        for (const auto& c : row) r.push_back(ms_json(c));
        cells_j.push_back(r);
    }
    return json{{"title", title}, {"rows", rows}, {"cols", cols}, {"cells", cells_j}};
}

std::string ComparisonTable::to_text() const {
    std::ostringstream os;
    os << title << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-12s", "");
    os << buf;
    for (const auto& c : cols) {
        std::snprintf(buf, sizeof buf, " %18s", c.c_str());
        os << buf;
    }
    os << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%-12s", rows[i].c_str());
        os << buf;
        for (const auto& c : cells[i]) {
            if (c) std::snprintf(buf, sizeof buf, " %8.1f%% +- %5.1f", c->mean, c->std);
            else std::snprintf(buf, sizeof buf, " %18s", "absent");
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

ComparisonTable comparison_table(const RunGroups& groups, TableKind kind) {
    const std::vector<AttackKind> attackers{AttackKind::Fnn, AttackKind::DrlJa};
    ComparisonTable t;
    for (auto a : attackers) t.rows.push_back(to_string(a));
    auto find = [&](AttackKind a, MitigationKind m) -> const ScenarioRuns* {
        auto it = groups.find(group_key(a, m));
        return it == groups.end() || it->second.runs.empty() ? nullptr : &it->second;
    };
    if (kind == TableKind::AttackerDegradation) {
        t.title = "attacker degradation vs no attack";
        t.cols = {"throughput", "latency"};
        const ScenarioRuns* base = find(AttackKind::None, MitigationKind::None);
        for (auto a : attackers) {
            const ScenarioRuns* att = find(a, MitigationKind::None);
            std::vector<std::optional<MeanStd>> row;
            for (auto k : {KpiKind::Throughput, KpiKind::Latency})
                row.push_back(base && att ? paired_degradation(*att, *base, k) : std::nullopt);
            t.cells.push_back(row);
        }
        return t;
    }
    const KpiKind k = kind == TableKind::MitigationThroughput ? KpiKind::Throughput : KpiKind::Latency;
    t.title = std::string("mitigation recovery of ") + to_string(k) + " vs attack without mitigation";
    t.cols = {"decoy-fnn", "decoy-drl"};
    for (auto a : attackers) {
        const ScenarioRuns* att = find(a, MitigationKind::None);
        std::vector<std::optional<MeanStd>> row;
        for (auto m : {MitigationKind::DecoyFnn, MitigationKind::DecoyDrl}) {
            const ScenarioRuns* mit = find(a, m);
            row.push_back(att && mit ? paired_recovery(*mit, *att, k) : std::nullopt);
        }
        t.cells.push_back(row);
    }
    return t;
}

} // namespace jamslice

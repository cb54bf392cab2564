#include "jamslice/netmodel.hpp"

#include "jamslice/errors.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace jamslice {

const char* to_string(Slice s) { return s == Slice::Embb ? "eMBB" : "uRLLC"; }

double distance_m(Position a, Position b) { return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m); }

namespace {

// Site i of a hexagonal lattice: the origin, then the first ring.
Position site_position(int i, double isd) {
    if (i == 0) return {};
    if (i <= 6) {
        const double a = (i - 1) * std::numbers::pi / 3.0;
        return {isd * std::cos(a), isd * std::sin(a)};
    }
    // second ring, coarse but with spacing >= isd
    const int k = i - 7;
    const double a = k * std::numbers::pi / 6.0;
    return {2.0 * isd * std::cos(a), 2.0 * isd * std::sin(a)};
}

} // namespace

Topology Topology::build(const TopologyParams& params, Rng& rng) {
    if (params.gnbs < 1) throw ConfigError("topology.gnbs: must be >= 1");
    if (params.rbs < 1) throw ConfigError("grid.rbgs: must be >= 1");
    Topology t;
    t.inter_site_m = params.inter_site_m;
    const double rb_power = params.max_tx_power_dbm - 10.0 * std::log10(static_cast<double>(params.rbs));
    for (int j = 0; j < params.gnbs; ++j) {
        t.gnbs.push_back({j, site_position(j, params.inter_site_m), params.rbs, rb_power, params.compute_hz});
    }
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> r2(params.min_ue_distance_m * params.min_ue_distance_m,
                                              params.cell_radius_m * params.cell_radius_m);
    int id = 0;
    for (const auto& g : t.gnbs) {
        auto drop = [&](Slice s) {
            const double r = std::sqrt(r2(rng));
            const double a = angle(rng);
            t.ues.push_back({id++, {g.pos.x_m + r * std::cos(a), g.pos.y_m + r * std::sin(a)}, s, g.id});
        };
        for (int k = 0; k < params.embb_ues; ++k) drop(Slice::Embb);
        for (int k = 0; k < params.urllc_ues; ++k) drop(Slice::Urllc);
    }
    return t;
}

const GnbSpec& Topology::gnb(int id) const {
    if (id < 0 || id >= static_cast<int>(gnbs.size()) || gnbs[id].id != id) {
        auto it = std::find_if(gnbs.begin(), gnbs.end(), [&](const GnbSpec& g) { return g.id == id; });
        if (it == gnbs.end()) throw LookupError("unknown gNB " + std::to_string(id));
        return *it;
    }
    return gnbs[id];
}

const UeSpec& Topology::ue(int id) const {
    if (id < 0 || id >= static_cast<int>(ues.size()) || ues[id].id != id) {
        auto it = std::find_if(ues.begin(), ues.end(), [&](const UeSpec& u) { return u.id == id; });
        if (it == ues.end()) throw LookupError("unknown UE " + std::to_string(id));
        return *it;
    }
    return ues[id];
}

std::vector<int> Topology::ues_of(int gnb, Slice slice) const {
    std::vector<int> out;
    for (const auto& u : ues)
        if (u.gnb == gnb && u.slice == slice) out.push_back(u.id);
    return out;
}

std::vector<std::string> Topology::violations(double max_tx_power_dbm) const {
    std::vector<std::string> out;
    if (gnbs.size() > 1) {
        double nearest = 1e300;
        for (std::size_t a = 0; a < gnbs.size(); ++a)
            for (std::size_t b = a + 1; b < gnbs.size(); ++b)
                nearest = std::min(nearest, distance_m(gnbs[a].pos, gnbs[b].pos));
        if (std::abs(nearest - inter_site_m) > 1e-6) {
            std::ostringstream os;
            os << "topology: nearest inter-site distance " << nearest << " m != " << inter_site_m << " m";
            out.push_back(os.str());
        }
    }
    for (const auto& g : gnbs) {
        if (g.rb_power_dbm > max_tx_power_dbm + 1e-9)
            out.push_back("topology: gNB " + std::to_string(g.id) + " per-RB power exceeds max transmission power");
    }
    for (const auto& u : ues) {
        const bool ok = std::any_of(gnbs.begin(), gnbs.end(), [&](const GnbSpec& g) { return g.id == u.gnb; });
        if (!ok) out.push_back("topology: UE " + std::to_string(u.id) + " references unknown gNB " + std::to_string(u.gnb));
    }
    return out;
}

std::vector<std::string> RbGrid::violations() const {
    std::vector<std::string> out;
    if (subcarriers <= 0) out.emplace_back("grid.subcarriers: must be > 0");
    if (rbgs <= 0) out.emplace_back("grid.rbgs: must be > 0");
    if (subcarrier_spacing_khz <= 0.0) out.emplace_back("grid.subcarrier_spacing_khz: must be > 0");
    if (bandwidth_mhz <= 0.0) out.emplace_back("grid.bandwidth_mhz: must be > 0");
    if (out.empty() && rbgs * rb_bandwidth_mhz() > bandwidth_mhz + 1e-9)
        out.emplace_back("grid.rbgs: rbgs x RB bandwidth exceeds grid.bandwidth_mhz");
    return out;
}

Allocation::Allocation(int gnbs, int ues, int rbs)
    : gnbs_(gnbs), ues_(ues), rbs_(rbs),
      x_(static_cast<std::size_t>(gnbs) * ues * rbs, 0), compute_(gnbs) {}

std::size_t Allocation::index(int gnb, int ue, int rb) const {
    if (gnb < 0 || gnb >= gnbs_ || ue < 0 || ue >= ues_ || rb < 0 || rb >= rbs_)
        throw LookupError("allocation index out of range");
    return (static_cast<std::size_t>(gnb) * ues_ + ue) * rbs_ + rb;
}

void Allocation::clear_gnb(int gnb) {
    const auto begin = x_.begin() + static_cast<std::ptrdiff_t>(index(gnb, 0, 0));
    std::fill(begin, begin + static_cast<std::ptrdiff_t>(ues_) * rbs_, 0);
    compute_[gnb] = {};
}

int Allocation::owner(int gnb, int rb) const {
    for (int u = 0; u < ues_; ++u)
        if (at(gnb, u, rb)) return u;
    return -1;
}

std::vector<int> Allocation::rbs_of(int gnb, int ue) const {
    std::vector<int> out;
    for (int r = 0; r < rbs_; ++r)
        if (at(gnb, ue, r)) out.push_back(r);
    return out;
}

std::vector<std::uint8_t> Allocation::occupancy(int gnb) const {
    std::vector<std::uint8_t> out(rbs_, 0);
    for (int r = 0; r < rbs_; ++r) out[r] = rb_in_use(gnb, r) ? 1 : 0;
    return out;
}

ChannelState::ChannelState(int gnbs_, int ues_, int rbs_)
    : gnbs(gnbs_), ues(ues_), rbs(rbs_),
      gain(static_cast<std::size_t>(gnbs_) * ues_ * rbs_, 0.0),
      tx_power_mw(static_cast<std::size_t>(gnbs_) * rbs_, 0.0) {}

double path_loss_db(double distance_km) {
    if (!(distance_km > 0.0)) throw DomainError("path_loss: distance must be positive");
    return 128.1 + 37.6 * std::log10(distance_km);
}

double shadowing_db(std::uint64_t seed, int gnb, int ue, double sigma_db) {
    Rng rng(mix64(seed ^ mix64((static_cast<std::uint64_t>(gnb) << 32) ^ static_cast<std::uint32_t>(ue))));
    return std::normal_distribution<double>(0.0, sigma_db)(rng);
}

double channel_gain(const Topology& topo, int gnb, int ue, int /*rb*/, std::uint64_t seed,
                    const LinkBudget& budget) {
    const auto& g = topo.gnb(gnb);
    const auto& u = topo.ue(ue);
    const double pl = path_loss_db(distance_m(g.pos, u.pos) / 1000.0);
    const double sh = shadowing_db(seed, gnb, ue, budget.shadowing_sigma_db);
    return db_to_linear(-(pl + sh + budget.penetration_loss_db) + budget.antenna_gain_db);
}

ChannelState build_channel(const Topology& topo, const RbGrid& grid, std::uint64_t seed,
                           const LinkBudget& budget, double noise_figure_db) {
    const int n_gnb = static_cast<int>(topo.gnbs.size());
    const int n_ue = static_cast<int>(topo.ues.size());
    ChannelState ch(n_gnb, n_ue, grid.rbgs);
    ch.rb_bandwidth_hz = grid.rb_bandwidth_hz();
    ch.noise_figure_db = noise_figure_db;
    ch.penetration_loss_db = budget.penetration_loss_db;
    ch.noise_density_mw_hz = dbm_to_mw(-174.0 + noise_figure_db);
    for (const auto& g : topo.gnbs) {
        for (const auto& u : topo.ues) {
            const double lin = channel_gain(topo, g.id, u.id, 0, seed, budget);
            for (int r = 0; r < grid.rbgs; ++r) ch.g(g.id, u.id, r) = lin;
        }
        for (int r = 0; r < grid.rbgs; ++r) ch.p(g.id, r) = dbm_to_mw(g.rb_power_dbm);
    }
    return ch;
}

double rb_sinr(const ChannelState& ch, const Allocation& alloc, int ue, int gnb, int rb, double jam_mw) {
    if (!alloc.at(gnb, ue, rb)) return 0.0;
    const double signal = ch.p(gnb, rb) * ch.g(gnb, ue, rb);
    double interference = 0.0;
    const int n = std::min(alloc.gnbs(), ch.gnbs);
    for (int j = 0; j < n; ++j) {
        if (j == gnb || rb >= alloc.rbs()) continue;
        if (alloc.rb_in_use(j, rb)) interference += ch.p(j, rb) * ch.g(j, ue, rb);
    }
    return signal / (ch.noise_mw() + interference + jam_mw);
}

double sinr(const ChannelState& ch, const Allocation& alloc, int ue, int gnb) {
    return sinr_jammed(ch, alloc, ue, gnb, 0.0);
}

double sinr_jammed(const ChannelState& ch, const Allocation& alloc, int ue, int gnb, double jam_mw) {
    if (jam_mw < 0.0) throw DomainError("sinr_jammed: jam power must be >= 0");
    double total = 0.0;
    for (int r = 0; r < alloc.rbs(); ++r)
        if (alloc.at(gnb, ue, r)) total += rb_sinr(ch, alloc, ue, gnb, r, jam_mw);
    return total;
}

double sinr_jammed(const ChannelState& ch, const Allocation& alloc, int ue, int gnb,
                   std::span<const double> jam_mw_per_rb) {
    double total = 0.0;
    for (int r = 0; r < alloc.rbs(); ++r) {
        if (!alloc.at(gnb, ue, r)) continue;
        const double jam = r < static_cast<int>(jam_mw_per_rb.size()) ? jam_mw_per_rb[r] : 0.0;
        if (jam < 0.0) throw DomainError("sinr_jammed: jam power must be >= 0");
        total += rb_sinr(ch, alloc, ue, gnb, r, jam);
    }
    return total;
}

double throughput_mbps(const ChannelState& ch, const Allocation& alloc, int ue, int gnb,
                       std::span<const double> jam_mw_per_rb) {
    double bps = 0.0;
    for (int r = 0; r < alloc.rbs(); ++r) {
        if (!alloc.at(gnb, ue, r)) continue;
        const double jam = r < static_cast<int>(jam_mw_per_rb.size()) ? jam_mw_per_rb[r] : 0.0;
        bps += shannon_bps(ch.rb_bandwidth_hz, rb_sinr(ch, alloc, ue, gnb, r, jam));
    }
    return bps / 1e6;
}

double total_delay_ms(const DelayBreakdown& d) {
    return d.tx_ms + d.rtx_ms + d.queue_ms + (d.at_edge ? d.edge_ms : d.cloud_ms);
}

double objective_reward(double embb_mbps, double urllc_delay_ms, const ObjectiveWeights& w) {
    return w.embb * embb_mbps + w.urllc * (w.target_delay_ms - urllc_delay_ms);
}

const char* to_string(ConstraintKind k) {
    switch (k) {
    case ConstraintKind::SharedRb: return "shared-rb";
    case ConstraintKind::RbOverAllocation: return "rb-over-allocation";
    case ConstraintKind::ComputeOverAllocation: return "compute-over-allocation";
    }
    return "?";
}

std::vector<ConstraintViolation> check_constraints(const Allocation& alloc, const Topology& topo) {
    std::vector<ConstraintViolation> out;
    for (int j = 0; j < alloc.gnbs(); ++j) {
        const GnbSpec* g = nullptr;
        for (const auto& cand : topo.gnbs)
            if (cand.id == j) g = &cand;
        int allocated = 0;
        for (int r = 0; r < alloc.rbs(); ++r) {
            int holders = 0;
            for (int u = 0; u < alloc.ues(); ++u) holders += alloc.at(j, u, r) ? 1 : 0;
            allocated += holders;
            if (holders > 1)
                out.push_back({ConstraintKind::SharedRb, j, r,
                               "RB " + std::to_string(r) + " held by " + std::to_string(holders) + " UEs"});
        }
        const int budget = g ? g->rbs : 0;
        if (allocated > budget)
            out.push_back({ConstraintKind::RbOverAllocation, j, -1,
                           std::to_string(allocated) + " RBs allocated, |N_j| = " + std::to_string(budget)});
        const auto& c = alloc.compute(j);
        const double cap = g ? g->compute_hz : 0.0;
        if (c.embb_hz < 0.0 || c.urllc_hz < 0.0 || c.embb_hz + c.urllc_hz > cap * (1.0 + 1e-12))
            out.push_back({ConstraintKind::ComputeOverAllocation, j, -1, "compute split exceeds C_j"});
    }
    return out;
}

} // namespace jamslice

#pragma once

// Physical-world model of one multi-cell downlink deployment: topology,
// per-link channel gains, SINR with optional jamming, Shannon rate, the
// end-to-end delay decomposition and the slicing objective.

#include "jamslice/rng.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace jamslice {

enum class Slice : std::uint8_t { Embb = 0, Urllc = 1 };

const char* to_string(Slice s);

struct Position {
    double x_m = 0.0;
    double y_m = 0.0;
};

double distance_m(Position a, Position b);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

struct GnbSpec {
    int id = 0;
    Position pos;
    int rbs = 13;                 // |N_j|
    double rb_power_dbm = 28.86;  // p_{j,r}
    double compute_hz = 1e9;      // C_j, CPU cycles per second
};

struct UeSpec {
    int id = 0;
    Position pos;
    Slice slice = Slice::Embb;
    int gnb = 0;
};

struct TopologyParams {
    int gnbs = 3;
    double inter_site_m = 500.0;
    double cell_radius_m = 125.0;
    double min_ue_distance_m = 10.0;
    int rbs = 13;
    double max_tx_power_dbm = 40.0;
    double compute_hz = 1e9;
    int embb_ues = 25;   // per gNB
    int urllc_ues = 20;  // per gNB
};

/// gNBs on a hexagonal-lattice layout with UEs dropped uniformly in each cell.
struct Topology {
    std::vector<GnbSpec> gnbs;
    std::vector<UeSpec> ues;
    double inter_site_m = 500.0;

    static Topology build(const TopologyParams& params, Rng& rng);

    const GnbSpec& gnb(int id) const;
    const UeSpec& ue(int id) const;
    std::vector<int> ues_of(int gnb, Slice slice) const;

    /// Invariant violations (empty when consistent).
    std::vector<std::string> violations(double max_tx_power_dbm) const;
};

/// Frequency grid of one carrier. An RB is `subcarriers` tones wide.
struct RbGrid {
    int subcarriers = 12;
    int rbgs = 13;
    double bandwidth_mhz = 20.0;
    double subcarrier_spacing_khz = 15.0;

    double rb_bandwidth_mhz() const { return subcarriers * subcarrier_spacing_khz / 1000.0; }
    double rb_bandwidth_hz() const { return rb_bandwidth_mhz() * 1e6; }
    std::vector<std::string> violations() const;
};

struct ComputeSplit {
    double embb_hz = 0.0;
    double urllc_hz = 0.0;
};

/// Binary RB assignment x_{j,u,r} plus the per-gNB compute split.
/// Dimensions are independent of any topology so infeasible maps can be
/// represented and reported by check_constraints.
class Allocation {
public:
    Allocation() = default;
    Allocation(int gnbs, int ues, int rbs);

    int gnbs() const { return gnbs_; }
    int ues() const { return ues_; }
    int rbs() const { return rbs_; }

    bool at(int gnb, int ue, int rb) const { return x_[index(gnb, ue, rb)] != 0; }
    void set(int gnb, int ue, int rb, bool on = true) { x_[index(gnb, ue, rb)] = on ? 1 : 0; }
    void clear_gnb(int gnb);

    /// UE holding RB `rb` of gNB `gnb`, or -1. First match if the map is infeasible.
    int owner(int gnb, int rb) const;
    bool rb_in_use(int gnb, int rb) const { return owner(gnb, rb) >= 0; }
    std::vector<int> rbs_of(int gnb, int ue) const;
    std::vector<std::uint8_t> occupancy(int gnb) const;

    ComputeSplit& compute(int gnb) { return compute_[gnb]; }
    const ComputeSplit& compute(int gnb) const { return compute_[gnb]; }

    bool operator==(const Allocation&) const = default;

private:
    std::size_t index(int gnb, int ue, int rb) const;

    int gnbs_ = 0;
    int ues_ = 0;
    int rbs_ = 0;
    std::vector<std::uint8_t> x_;
    std::vector<ComputeSplit> compute_;
};

/// Everything the SINR expressions consume. Gains are linear, indexed by
/// (transmitting gNB, receiving UE, rb); the same tensor holds serving-link
/// gains q and cross-cell gains g.
struct ChannelState {
    int gnbs = 0;
    int ues = 0;
    int rbs = 0;
    std::vector<double> gain;          // gnbs*ues*rbs
    std::vector<double> tx_power_mw;   // gnbs*rbs
    double noise_density_mw_hz = 0.0;  // N_0
    double rb_bandwidth_hz = 180e3;
    double noise_figure_db = 5.0;
    double penetration_loss_db = 5.0;

    ChannelState() = default;
    ChannelState(int gnbs, int ues, int rbs);

    double& g(int gnb, int ue, int rb) { return gain[(static_cast<std::size_t>(gnb) * ues + ue) * rbs + rb]; }
    double g(int gnb, int ue, int rb) const { return gain[(static_cast<std::size_t>(gnb) * ues + ue) * rbs + rb]; }
    double& p(int gnb, int rb) { return tx_power_mw[static_cast<std::size_t>(gnb) * rbs + rb]; }
    double p(int gnb, int rb) const { return tx_power_mw[static_cast<std::size_t>(gnb) * rbs + rb]; }
    double noise_mw() const { return noise_density_mw_hz * rb_bandwidth_hz; }
};

struct LinkBudget {
    double penetration_loss_db = 5.0;
    double antenna_gain_db = 15.0;
    double shadowing_sigma_db = 8.0;
};

/// 128.1 + 37.6 log10(d[km]).
double path_loss_db(double distance_km);

/// Log-normal shadowing realization for one link, fixed per (seed, link).
double shadowing_db(std::uint64_t seed, int gnb, int ue, double sigma_db);

/// Linear channel gain of (gnb, ue) on `rb`; deterministic in `seed`.
/// Gain in dB is -(path loss + shadowing + penetration) + antenna gain.
double channel_gain(const Topology& topo, int gnb, int ue, int rb, std::uint64_t seed,
                    const LinkBudget& budget);

/// Builds the full gain tensor and per-RB transmit powers for a topology.
ChannelState build_channel(const Topology& topo, const RbGrid& grid, std::uint64_t seed,
                           const LinkBudget& budget, double noise_figure_db);

/// Per-RB SINR of `ue` on `rb` (0 if the UE does not hold the RB).
double rb_sinr(const ChannelState& ch, const Allocation& alloc, int ue, int gnb, int rb,
               double jam_mw = 0.0);

/// Legitimate SINR of a UE, summed over its RBs (linear).
double sinr(const ChannelState& ch, const Allocation& alloc, int ue, int gnb);

/// SINR with `jam_mw` of received jamming power added on each of the UE's RBs.
double sinr_jammed(const ChannelState& ch, const Allocation& alloc, int ue, int gnb, double jam_mw);
/// Per-RB jamming power variant; `jam_mw_per_rb` is indexed by RB.
double sinr_jammed(const ChannelState& ch, const Allocation& alloc, int ue, int gnb,
                   std::span<const double> jam_mw_per_rb);

/// Shannon rate in bits/s over one RB, b log2(1 + sinr).
inline double shannon_bps(double bandwidth_hz, double rb_sinr_linear) {
    return bandwidth_hz * std::log2(1.0 + rb_sinr_linear);
}

/// Sum of per-RB Shannon rates of a UE in Mbps, optionally under jamming.
double throughput_mbps(const ChannelState& ch, const Allocation& alloc, int ue, int gnb,
                       std::span<const double> jam_mw_per_rb = {});

struct DelayBreakdown {
    double tx_ms = 0.0;
    double rtx_ms = 0.0;
    double queue_ms = 0.0;
    double edge_ms = 0.0;
    double cloud_ms = 0.0;
    bool at_edge = true;  // eta
};

/// d_tx + d_rtx + d_que + eta d_edge + (1 - eta) d_cloud.
double total_delay_ms(const DelayBreakdown& d);

struct ObjectiveWeights {
    double embb = 1.0;
    double urllc = 1.0;
    double target_delay_ms = 1.0;
};

/// w_eMBB B + w_uRLLC (D_tar - D).
double objective_reward(double embb_mbps, double urllc_delay_ms, const ObjectiveWeights& w);

enum class ConstraintKind : std::uint8_t { SharedRb, RbOverAllocation, ComputeOverAllocation };

struct ConstraintViolation {
    ConstraintKind kind;
    int gnb = 0;
    int rb = -1;
    std::string detail;
};

const char* to_string(ConstraintKind k);

/// All violations of the single-owner, RB-budget and compute-budget
/// constraints; empty iff the allocation is feasible.
std::vector<ConstraintViolation> check_constraints(const Allocation& alloc, const Topology& topo);

} // namespace jamslice

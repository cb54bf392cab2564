#pragma once

#include "jamslice/netmodel.hpp"
#include "jamslice/rng.hpp"

#include <cstdint>
#include <deque>
#include <vector>

namespace jamslice {

struct TrafficParams {
    double embb_load_mbps = 2.0;
    double urllc_load_mbps = 2.0;
    int embb_packet_bytes = 100;
    int urllc_packet_bytes = 50;
    double urllc_cbr_fraction = 0.2;  // remainder is Poisson
};

struct Arrivals {
    int embb = 0;
    int urllc = 0;
    bool operator==(const Arrivals&) const = default;
};

/// Expected packets per TTI for a load in Mbps.
double packets_per_tti(double load_mbps, int packet_bytes, double tti_s);

/// Per-slice packet arrival process: Poisson eMBB, mixed CBR/Poisson uRLLC.
/// The CBR share is a deterministic credit accumulator, so a CBR-only
/// stream with an integral per-TTI rate emits the same count every TTI.
class TrafficGenerator {
public:
    TrafficGenerator(const TrafficParams& params, double tti_s);

    Arrivals next(Rng& rng);

    double embb_rate() const { return embb_lambda_; }
    double urllc_rate() const { return urllc_lambda_; }

private:
    TrafficParams params_;
    double embb_lambda_ = 0.0;
    double urllc_lambda_ = 0.0;
    double cbr_credit_ = 0.0;
};

struct Packet {
    std::uint64_t id = 0;
    int ue = 0;
    Slice slice = Slice::Embb;
    int bits = 0;
    int remaining_bits = 0;
    std::int64_t arrival_tti = 0;
    std::int64_t eligible_tti = 0;  // HARQ round trip holds the packet until here
    int tx_ttis = 0;
    int retransmissions = 0;
};

/// Bounded FIFO of pending requests for one slice. Arrivals beyond the
/// capacity are refused and counted as overflow drops.
class SliceQueue {
public:
    explicit SliceQueue(Slice slice, int capacity) : slice_(slice), capacity_(capacity) {}

    bool push(Packet p);
    std::deque<Packet>& packets() { return packets_; }
    const std::deque<Packet>& packets() const { return packets_; }
    int size() const { return static_cast<int>(packets_.size()); }
    int capacity() const { return capacity_; }
    Slice slice() const { return slice_; }
    std::uint64_t overflow_drops() const { return overflow_; }

private:
    Slice slice_;
    int capacity_;
    std::deque<Packet> packets_;
    std::uint64_t overflow_ = 0;
};

} // namespace jamslice

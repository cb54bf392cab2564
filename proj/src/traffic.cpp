#include "jamslice/traffic.hpp"

#include "jamslice/errors.hpp"

#include <cmath>

namespace jamslice {

double packets_per_tti(double load_mbps, int packet_bytes, double tti_s) {
    if (load_mbps < 0.0) throw DomainError("traffic: load must be >= 0");
    if (packet_bytes <= 0) throw DomainError("traffic: packet size must be > 0");
    return load_mbps * 1e6 * tti_s / (8.0 * packet_bytes);
}

TrafficGenerator::TrafficGenerator(const TrafficParams& params, double tti_s)
    : params_(params),
      embb_lambda_(packets_per_tti(params.embb_load_mbps, params.embb_packet_bytes, tti_s)),
      urllc_lambda_(packets_per_tti(params.urllc_load_mbps, params.urllc_packet_bytes, tti_s)) {
    if (params.urllc_cbr_fraction < 0.0 || params.urllc_cbr_fraction > 1.0)
        throw DomainError("traffic: CBR fraction must lie in [0, 1]");
}

Arrivals TrafficGenerator::next(Rng& rng) {
    Arrivals a;
    // Draw order is fixed (eMBB, then uRLLC Poisson) so streams stay aligned.
    if (embb_lambda_ > 0.0) a.embb = std::poisson_distribution<int>(embb_lambda_)(rng);
    const double poisson_rate = urllc_lambda_ * (1.0 - params_.urllc_cbr_fraction);
    if (poisson_rate > 0.0) a.urllc = std::poisson_distribution<int>(poisson_rate)(rng);
    cbr_credit_ += urllc_lambda_ * params_.urllc_cbr_fraction;
    const double whole = std::floor(cbr_credit_ + 1e-12);
    a.urllc += static_cast<int>(whole);
    cbr_credit_ -= whole;
    return a;
}

bool SliceQueue::push(Packet p) {
    if (size() >= capacity_) {
        ++overflow_;
        return false;
    }
    packets_.push_back(p);
    return true;
}

} // namespace jamslice

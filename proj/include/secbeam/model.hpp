#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace secbeam::model {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// Converts a dBm figure to watts: 10^((dBm - 30)/10).
double dbm_to_watts(double p_dbm);

/// Inverse of dbm_to_watts; p_watts must be strictly positive.
double watts_to_dbm(double p_watts);

/**
 * Static description of one system instance: a multi-antenna transmitter
 * serving K single-antenna information-plus-energy receivers under L
 * multi-antenna eavesdroppers that also harvest energy.
 *
 * All powers and variances are in watts. Noise is split per receiver into
 * an antenna component (present before power splitting) and a processing
 * component (added after the information branch).
 */
struct SystemParams {
    int n_tx = 5;        // transmit antennas
    int n_users = 3;     // legitimate single-antenna users (K)
    int n_eves = 3;      // eavesdroppers (L)
    int n_eve_rx = 2;    // antennas per eavesdropper

    double sigma2_sa = 1e-7;  // user antenna noise
    double sigma2_sp = 1e-7;  // user processing noise
    double sigma2_ea = 1e-7;  // eavesdropper antenna noise
    double sigma2_ep = 1e-7;  // eavesdropper processing noise

    double eta_s = 1.0;  // user energy-conversion efficiency
    double eta_e = 1.0;  // eavesdropper energy-conversion efficiency

    double p_total = 1.0;   // transmit power budget
    double e_bar_s = 0.0;   // per-user minimum harvested energy
    double e_bar_e = 0.0;   // per-eavesdropper minimum harvested energy

    double channel_variance = 1e-3;  // per-entry complex channel variance

    /// Combined eavesdropper noise entering the worst-case rate.
    double sigma2_e() const { return sigma2_ea + sigma2_ep; }

    /// Throws std::invalid_argument when any invariant fails.
    void validate() const;
};

/// One channel realization: K user vectors and L eavesdropper matrices.
struct ChannelSet {
    std::vector<VectorXcd> h_users;  // each n_tx
    std::vector<MatrixXcd> h_eves;   // each n_tx x n_eve_rx

    void validate(const SystemParams& params) const;
};

/**
 * Draws an i.i.d. CSCG channel set. Each user and each eavesdropper draws
 * from its own (seed, index)-derived substream, so a seed identifies the
 * realization bit-for-bit and growing one population (say 3 to 5 users)
 * leaves every other channel unchanged.
 */
ChannelSet generate_channels(const SystemParams& params, std::uint64_t seed);

}  // namespace secbeam::model

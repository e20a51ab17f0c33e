#pragma once

#include <optional>
#include <vector>

#include "secbeam/model.hpp"

namespace secbeam::metrics {

using model::ChannelSet;
using model::MatrixXcd;
using model::SystemParams;
using model::VectorXcd;

/// Tolerance for the TransmitDesign power/PSD invariants.
inline constexpr double kDesignTol = 1e-6;

/// Lower clamp for power-splitting ratios (open interval approximation).
inline constexpr double kRhoEps = 1e-9;

/**
 * A complete transmit strategy: information covariance, artificial-noise
 * covariance, and per-user power-splitting ratios. `beamformer` is present
 * only when the information covariance is (numerically) rank-one, in which
 * case q q^H reproduces q_cov.
 */
struct TransmitDesign {
    MatrixXcd q_cov;   // information signal covariance, PSD
    MatrixXcd an_cov;  // artificial-noise covariance, PSD
    std::vector<double> rho;  // per-user split toward decoding, each in (0,1]
    std::optional<VectorXcd> beamformer;

    /// Throws when PSD-ness, the power budget, or the beamformer
    /// consistency bound is violated beyond kDesignTol.
    void validate(const SystemParams& params) const;
};

/// Rates in bits per channel use, energies in watts.
struct DesignReport {
    std::vector<double> user_rates;
    std::vector<double> eve_rates_upper;
    std::vector<double> user_energies;
    std::vector<double> eve_energies;
    double secrecy_rate = 0.0;  // max(0, min_k user - max_l eve)
};

/// Whether the worst-case eavesdropper rate keeps the receiver noise term
/// inside the inverted matrix. `kOmit` reproduces a published variant that
/// drops it and can return +inf when the AN term is singular.
enum class EveNoiseTerm { kInclude, kOmit };

/// log2(1 + h^H Q h / (h^H V h + sigma2_sa + sigma2_sp / rho_k)).
double user_rate(const VectorXcd& h, const TransmitDesign& design, int k,
                 const SystemParams& params);

/// Worst-case (split-free) eavesdropper rate
/// log2 det(I + (H^H V H + sigma2_e I)^{-1} H^H Q H).
double eve_rate_upper(const MatrixXcd& h_eve, const MatrixXcd& q_cov,
                      const MatrixXcd& an_cov, const SystemParams& params,
                      EveNoiseTerm noise_term = EveNoiseTerm::kInclude);

/// Eavesdropper rate at an explicit split rho_e in (0,1]:
/// log2 det(I + [rho_e(sigma2_ea I + H^H V H) + sigma2_ep I]^{-1} rho_e H^H Q H).
double eve_rate_exact(const MatrixXcd& h_eve, const MatrixXcd& q_cov,
                      const MatrixXcd& an_cov, double rho_e,
                      const SystemParams& params);

/// eta_s (1 - rho_k) [h^H Q h + h^H V h + sigma2_sa].
double user_energy(const VectorXcd& h, const TransmitDesign& design, int k,
                   const SystemParams& params);

/// eta_e [tr(H^H Q H) + tr(H^H V H) + n_eve_rx * sigma2_ea] (harvest-only).
double eve_energy(const MatrixXcd& h_eve, const MatrixXcd& q_cov,
                  const MatrixXcd& an_cov, const SystemParams& params);

/// Full per-design evaluation; secrecy rate clamped at zero.
DesignReport achievable_secrecy_rate(const TransmitDesign& design,
                                     const ChannelSet& channels,
                                     const SystemParams& params,
                                     EveNoiseTerm noise_term = EveNoiseTerm::kInclude);

}  // namespace secbeam::metrics

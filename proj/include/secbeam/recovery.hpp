#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "secbeam/hermitian.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/model.hpp"

namespace secbeam::recovery {

using metrics::EveNoiseTerm;
using metrics::TransmitDesign;
using model::ChannelSet;
using model::MatrixXcd;
using model::SystemParams;
using model::VectorXcd;

enum class Method { kDirectEigenvector, kGaussianRandomization };

std::string to_string(Method method);

struct RecoveryReport {
    int rank_q = 0;
    int rank_v = 0;
    bool prop1_holds = false;
    Method method = Method::kGaussianRandomization;
    int n_candidates_tried = 0;
    int n_feasible = 0;
    double best_rate = 0.0;  // bits
};

/// Fills the rank fields: prop1_holds iff rank_q <= n_users and
/// rank_q^2 + rank_v^2 <= 2 n_users + n_eves.
RecoveryReport check_proposition1(const MatrixXcd& q_cov, const MatrixXcd& an_cov,
                                  int n_users, int n_eves,
                                  double rel_tol = herm::kRankRelTol);

/// Principal-eigenpair factor sqrt(lambda_1) u_1 of a numerically rank-one
/// PSD matrix; rejects inputs whose numerical rank differs from one.
VectorXcd extract_rank_one(const MatrixXcd& q_cov,
                           double rel_tol = herm::kRankRelTol);

/**
 * Rank-one beamformer recovery by randomized sampling. Candidates are
 * q_i = q_cov^{1/2} z_i (i.i.d. standard circular Gaussian z_i) plus the
 * deterministic principal-eigenvector candidate, all rescaled to
 * ||q_i||^2 = tr(q_cov) so the power budget is unchanged with an_cov fixed.
 * Per candidate the splits are re-picked as the largest values meeting the
 * user energy floor (the user rate increases in rho); candidates violating
 * any energy or power constraint are rejected. Returns the feasible
 * candidate with the best secrecy rate. The covariance-level design scored
 * with rho_init is kept as the fallback, so the returned rate never falls
 * below the covariance-level rate; a fallback return carries no beamformer.
 */
std::pair<TransmitDesign, RecoveryReport> gaussian_randomization(
    const MatrixXcd& q_cov, const MatrixXcd& an_cov,
    const std::vector<double>& rho_init, const SystemParams& params,
    const ChannelSet& channels, int n_rand, std::uint64_t seed,
    EveNoiseTerm noise_term = EveNoiseTerm::kInclude);

}  // namespace secbeam::recovery

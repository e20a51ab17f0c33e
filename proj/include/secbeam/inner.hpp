#pragma once

#include "secbeam/conic.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/model.hpp"

namespace secbeam::inner {

using conic::ConicProgram;
using conic::SolveStatus;
using metrics::TransmitDesign;
using model::ChannelSet;
using model::MatrixXcd;
using model::SystemParams;

/// Lower clamp approximating the strict bounds 0 < rho_t and 0 < xi.
inline constexpr double kStrictEps = 1e-9;

/**
 * Fixed-t relaxation in normalized variables: q_cov_t = xi Q, an_cov_t = xi V,
 * rho_t = xi rho. The per-user normalization pins every user noise-plus-
 * interference denominator to 1/xi, so theta (the worst-user normalized
 * signal power) maps back to the worst-user SINR of the recovered design.
 */
struct InnerSolution {
    double t = 0.0;
    MatrixXcd q_cov_t;       // normalized information covariance
    MatrixXcd an_cov_t;      // normalized artificial-noise covariance
    Eigen::VectorXd rho_t;   // normalized splits, one per user, in (0, xi]
    Eigen::VectorXd slack;   // per-user surrogate for xi^2 sigma2_sp / rho_t
    double xi = 0.0;
    double theta = 0.0;      // inner objective value
    SolveStatus status = SolveStatus::kNumericalFailure;
    conic::Residuals residuals;
    int iterations = 0;
    double sigma2_sp = 0.0;  // carried for the splitting-ratio repair
};

/**
 * Builds the conic relaxation for a fixed t in (0, 1]. At t = 1 the
 * leakage coefficient is exactly zero and the eavesdropper blocks
 * degenerate to -H^H q_cov_t H being PSD, i.e. zero received signal.
 */
ConicProgram build_inner(const SystemParams& params, const ChannelSet& channels,
                         double t);

/// Builds and solves. Infeasible means the energy floors cannot be met at
/// this t; numerical_failure means the t-point should be skipped.
InnerSolution solve_inner(const SystemParams& params, const ChannelSet& channels,
                          double t, const conic::SolveOptions& options = {});

/**
 * Inverse normalization with the splitting-ratio repair
 * rho_k = min(rho_t_k, xi^2 sigma2_sp / slack_k) / xi. The repair pins the
 * recovered user denominator to exactly 1/xi (making the worst-user SINR
 * equal theta) and, by shrinking rho, can only loosen the user energy floor.
 * Requires sol.status == optimal.
 */
TransmitDesign recover_design(const InnerSolution& sol);

}  // namespace secbeam::inner

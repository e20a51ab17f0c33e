#pragma once

#include <Eigen/Core>
#include <complex>

namespace secbeam::herm {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

/// Max allowed relative deviation from H = H^H before inputs are rejected.
inline constexpr double kHermitianTol = 1e-12;

/// Default relative eigenvalue threshold for numerical rank decisions.
inline constexpr double kRankRelTol = 1e-6;

/// (H + H^H)/2; absorbs solver asymmetry noise.
MatrixXcd symmetrize(const MatrixXcd& h);

/// True when ||H - H^H|| <= tol * max(1, ||H||) (Frobenius).
bool is_hermitian(const MatrixXcd& h, double tol = kHermitianTol);

/**
 * Real symmetric embedding T(H) = [[Re H, -Im H], [Im H, Re H]].
 * T(H) is PSD iff H is PSD; each eigenvalue of H appears twice in T(H);
 * trace(T(H)) = 2 trace(H). Rejects non-Hermitian input.
 */
MatrixXd embed_real(const MatrixXcd& h);

/// Re(h^H M h); the imaginary residue of a Hermitian form is discarded.
double quadratic_form(const VectorXcd& h, const MatrixXcd& m);

/// Number of eigenvalues above rel_tol * lambda_max; 0 for the zero matrix.
/// Input must be PSD up to noise (small negative eigenvalues are ignored).
int numerical_rank(const MatrixXcd& h, double rel_tol = kRankRelTol);

/**
 * S with S S^H = H for PSD H, via eigendecomposition. Eigenvalues in
 * [-1e-9 * lambda_max, 0) are clamped to zero; anything more negative is
 * rejected as indefinite.
 */
MatrixXcd psd_sqrt(const MatrixXcd& h);

}  // namespace secbeam::herm

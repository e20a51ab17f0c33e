#pragma once

#include <Eigen/Core>
#include <vector>

namespace secbeam::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

const char* to_string(SolveStatus status);

/// Cone layout of the slack vector: `l` nonnegative entries first, then one
/// block per second-order cone of the listed dimension, then one svec block
/// per PSD cone of the listed matrix side.
struct ConeDims {
    int l = 0;
    std::vector<int> soc;
    std::vector<int> psd;

    int total_dim() const;
    /// Barrier degree: l + #soc + sum of PSD sides.
    int degree() const;
};

/**
 * Conic program in primal standard form
 *     minimize    c'x
 *     subject to  A x = b,   G x + s = h,   s in K,
 * with dense data. The dual is  max -b'y - h'z  s.t.  G'z + A'y + c = 0,
 * z in K (all cones here are self-dual).
 */
struct StandardForm {
    VectorXd c;
    MatrixXd A;
    VectorXd b;
    MatrixXd G;
    VectorXd h;
    ConeDims cones;

    void check_dims() const;  // throws std::invalid_argument on mismatch
};

/// svec of a symmetric matrix: lower-triangular columns stacked, with
/// off-diagonal entries scaled by sqrt(2) so that svec(A)'svec(B) = tr(AB).
VectorXd sym_svec(const MatrixXd& m);

/// Inverse of sym_svec for a block of side n.
MatrixXd sym_smat(const Eigen::Ref<const VectorXd>& v, int n);

struct IpmOptions {
    double feastol = 1e-8;
    double abstol = 1e-8;
    double reltol = 1e-8;
    /// Fallback precision: when progress stalls before reaching the targets
    /// above, the best iterate seen is still accepted at this level.
    double acceptable_tol = 1e-6;
    int max_iters = 100;
};

struct IpmResult {
    SolveStatus status = SolveStatus::kNumericalFailure;
    VectorXd x, y, z, s;     // solution when optimal; certificate otherwise
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double pres = 0.0;       // relative primal residual at exit
    double dres = 0.0;       // relative dual residual at exit
    double gap = 0.0;        // absolute duality gap at exit
    double relgap = 0.0;
    int iterations = 0;
};

/**
 * Homogeneous self-dual interior-point solver with Nesterov-Todd scaling
 * and a Mehrotra predictor-corrector step, over products of nonnegative,
 * second-order, and PSD cones. Deterministic for fixed inputs.
 */
IpmResult ipm_solve(const StandardForm& sf, const IpmOptions& opts = {});

}  // namespace secbeam::conic

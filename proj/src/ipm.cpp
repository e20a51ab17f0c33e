#include "secbeam/ipm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace secbeam::conic {

namespace {

constexpr double kStepFraction = 0.99;
constexpr double kRegEps = 1e-8;
constexpr int kStallWindow = 10;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class BlockKind { kOrthant, kSoc, kPsd };

struct Block {
    BlockKind kind;
    int offset;
    int dim;   // length in the slack vector
    int side;  // matrix side for PSD blocks
};

std::vector<Block> make_blocks(const ConeDims& cones) {
    std::vector<Block> blocks;
    int off = 0;
    if (cones.l > 0) {
        blocks.push_back({BlockKind::kOrthant, off, cones.l, 0});
        off += cones.l;
    }
    for (int d : cones.soc) {
        blocks.push_back({BlockKind::kSoc, off, d, 0});
        off += d;
    }
    for (int n : cones.psd) {
        blocks.push_back({BlockKind::kPsd, off, n * (n + 1) / 2, n});
        off += n * (n + 1) / 2;
    }
    return blocks;
}

/// Identity element of the cone product (ones / (1,0,..) / svec(I)).
VectorXd cone_identity(const std::vector<Block>& blocks, int m) {
    VectorXd e = VectorXd::Zero(m);
    for (const auto& blk : blocks) {
        switch (blk.kind) {
            case BlockKind::kOrthant:
                e.segment(blk.offset, blk.dim).setOnes();
                break;
            case BlockKind::kSoc:
                e(blk.offset) = 1.0;
                break;
            case BlockKind::kPsd:
                e.segment(blk.offset, blk.dim) =
                    sym_svec(MatrixXd::Identity(blk.side, blk.side));
                break;
        }
    }
    return e;
}

/// Distance to the cone boundary along the identity direction: positive
/// inside the interior, negative outside. Additive under u + alpha*e.
double cone_margin(const std::vector<Block>& blocks, const VectorXd& u) {
    double margin = kInfinity;
    for (const auto& blk : blocks) {
        const auto seg = u.segment(blk.offset, blk.dim);
        switch (blk.kind) {
            case BlockKind::kOrthant:
                margin = std::min(margin, seg.minCoeff());
                break;
            case BlockKind::kSoc:
                margin = std::min(margin, seg(0) - seg.tail(blk.dim - 1).norm());
                break;
            case BlockKind::kPsd: {
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym_smat(seg, blk.side),
                                                           Eigen::EigenvaluesOnly);
                margin = std::min(margin, es.eigenvalues().minCoeff());
                break;
            }
        }
    }
    return margin;
}

/// sup { alpha >= 0 : u + alpha du in K } for u strictly inside K.
double max_step(const std::vector<Block>& blocks, const VectorXd& u, const VectorXd& du) {
    double step = kInfinity;
    for (const auto& blk : blocks) {
        const auto useg = u.segment(blk.offset, blk.dim);
        const auto dseg = du.segment(blk.offset, blk.dim);
        switch (blk.kind) {
            case BlockKind::kOrthant:
                for (int i = 0; i < blk.dim; ++i) {
                    if (dseg(i) < 0.0) step = std::min(step, -useg(i) / dseg(i));
                }
                break;
            case BlockKind::kSoc: {
                // First root of (u0+a d0)^2 - |u1+a d1|^2 = 0 with u interior.
                const double u0 = useg(0), d0 = dseg(0);
                const auto u1 = useg.tail(blk.dim - 1);
                const auto d1 = dseg.tail(blk.dim - 1);
                const double qa = d0 * d0 - d1.squaredNorm();
                const double qb = 2.0 * (u0 * d0 - u1.dot(d1));
                const double qc = u0 * u0 - u1.squaredNorm();
                double root = kInfinity;
                if (std::abs(qa) < 1e-300) {
                    if (qb < 0.0) root = -qc / qb;
                } else {
                    const double disc = qb * qb - 4.0 * qa * qc;
                    if (disc >= 0.0) {
                        const double sq = std::sqrt(disc);
                        const double r1 = (-qb - sq) / (2.0 * qa);
                        const double r2 = (-qb + sq) / (2.0 * qa);
                        if (r1 > 0.0) root = std::min(root, r1);
                        if (r2 > 0.0) root = std::min(root, r2);
                    }
                }
                // Also keep the tip coordinate nonnegative.
                if (d0 < 0.0) root = std::min(root, -u0 / d0);
                step = std::min(step, root);
                break;
            }
            case BlockKind::kPsd: {
                const MatrixXd s = sym_smat(useg, blk.side);
                const MatrixXd d = sym_smat(dseg, blk.side);
                Eigen::LLT<MatrixXd> llt(s);
                if (llt.info() != Eigen::Success) return 0.0;
                const MatrixXd l = llt.matrixL();
                const MatrixXd w =
                    l.triangularView<Eigen::Lower>().solve(
                        l.triangularView<Eigen::Lower>().solve(d).transpose());
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(w, Eigen::EigenvaluesOnly);
                const double lmin = es.eigenvalues().minCoeff();
                if (lmin < 0.0) step = std::min(step, -1.0 / lmin);
                break;
            }
        }
    }
    return step;
}

/// Nesterov-Todd scaling W for one iteration: W^{-T} s = W z = lambda.
struct Scaling {
    const std::vector<Block>* blocks = nullptr;
    // Orthant: w_i = sqrt(s_i/z_i).
    VectorXd orthant_w;
    // SOC per block: beta and unit-hyperbolic point wbar.
    std::vector<double> soc_beta;
    std::vector<VectorXd> soc_wbar;
    // PSD per block: R, R^{-1}, and lambda eigenvalues (diagonal of Sigma).
    std::vector<MatrixXd> psd_r;
    std::vector<MatrixXd> psd_rinv;
    std::vector<VectorXd> psd_lambda;

    VectorXd lambda;  // W z

    bool compute(const std::vector<Block>& blks, const VectorXd& s, const VectorXd& z);
    VectorXd apply(const VectorXd& u) const;          // W u
    VectorXd apply_t(const VectorXd& u) const;        // W' u
    VectorXd apply_inv_t(const VectorXd& u) const;    // W^{-T} u
    VectorXd apply_wtw_inv(const VectorXd& u) const;  // (W'W)^{-1} u
};

bool Scaling::compute(const std::vector<Block>& blks, const VectorXd& s, const VectorXd& z) {
    blocks = &blks;
    lambda = VectorXd::Zero(s.size());
    soc_beta.clear();
    soc_wbar.clear();
    psd_r.clear();
    psd_rinv.clear();
    psd_lambda.clear();
    for (const auto& blk : blks) {
        const auto sseg = s.segment(blk.offset, blk.dim);
        const auto zseg = z.segment(blk.offset, blk.dim);
        switch (blk.kind) {
            case BlockKind::kOrthant: {
                if ((sseg.array() <= 0.0).any() || (zseg.array() <= 0.0).any()) return false;
                orthant_w = (sseg.array() / zseg.array()).sqrt();
                lambda.segment(blk.offset, blk.dim) =
                    (sseg.array() * zseg.array()).sqrt();
                break;
            }
            case BlockKind::kSoc: {
                const int d = blk.dim;
                const double snorm2 =
                    sseg(0) * sseg(0) - sseg.tail(d - 1).squaredNorm();
                const double znorm2 =
                    zseg(0) * zseg(0) - zseg.tail(d - 1).squaredNorm();
                if (snorm2 <= 0.0 || znorm2 <= 0.0 || sseg(0) <= 0.0 || zseg(0) <= 0.0) {
                    return false;
                }
                const double sj = std::sqrt(snorm2), zj = std::sqrt(znorm2);
                VectorXd sbar = sseg / sj, zbar = zseg / zj;
                const double gamma = std::sqrt((1.0 + sbar.dot(zbar)) / 2.0);
                // Scaling point (sbar + J zbar) / (2 gamma), then its Jordan
                // square root; both have unit hyperbolic norm.
                VectorXd wmid(d);
                wmid(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
                wmid.tail(d - 1) =
                    (sbar.tail(d - 1) - zbar.tail(d - 1)) / (2.0 * gamma);
                VectorXd wbar = wmid;
                wbar(0) += 1.0;
                wbar /= std::sqrt(2.0 * wbar(0));
                const double beta = std::sqrt(sj / zj);
                soc_beta.push_back(beta);
                soc_wbar.push_back(wbar);
                // lambda = W z = beta (2 wbar (wbar'z) - Jz).
                VectorXd jz(d);
                jz(0) = zseg(0);
                jz.tail(d - 1) = -zseg.tail(d - 1);
                lambda.segment(blk.offset, d) =
                    beta * (2.0 * wbar * wbar.dot(zseg) - jz);
                break;
            }
            case BlockKind::kPsd: {
                const MatrixXd sm = sym_smat(sseg, blk.side);
                const MatrixXd zm = sym_smat(zseg, blk.side);
                Eigen::LLT<MatrixXd> ls(sm), lz(zm);
                if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
                const MatrixXd lsm = ls.matrixL();
                const MatrixXd lzm = lz.matrixL();
                Eigen::JacobiSVD<MatrixXd> svd(lzm.transpose() * lsm,
                                               Eigen::ComputeFullU | Eigen::ComputeFullV);
                const VectorXd sig = svd.singularValues();
                if (sig.minCoeff() <= 0.0) return false;
                const VectorXd sig_isqrt = sig.cwiseSqrt().cwiseInverse();
                const MatrixXd r = lsm * svd.matrixV() * sig_isqrt.asDiagonal();
                const MatrixXd rinv = sig.cwiseSqrt().asDiagonal() *
                                      svd.matrixV().transpose() *
                                      lsm.triangularView<Eigen::Lower>()
                                          .solve(MatrixXd::Identity(blk.side, blk.side));
                psd_r.push_back(r);
                psd_rinv.push_back(rinv);
                psd_lambda.push_back(sig);
                lambda.segment(blk.offset, blk.dim) =
                    sym_svec(sig.asDiagonal() * MatrixXd::Identity(blk.side, blk.side));
                break;
            }
        }
    }
    return true;
}

VectorXd Scaling::apply(const VectorXd& u) const {
    VectorXd out = VectorXd::Zero(u.size());
    int soc_i = 0, psd_i = 0;
    for (const auto& blk : *blocks) {
        const auto seg = u.segment(blk.offset, blk.dim);
        switch (blk.kind) {
            case BlockKind::kOrthant:
                out.segment(blk.offset, blk.dim) = orthant_w.cwiseProduct(seg);
                break;
            case BlockKind::kSoc: {
                const auto& wbar = soc_wbar[soc_i];
                const double beta = soc_beta[soc_i];
                VectorXd ju(blk.dim);
                ju(0) = seg(0);
                ju.tail(blk.dim - 1) = -seg.tail(blk.dim - 1);
                out.segment(blk.offset, blk.dim) =
                    beta * (2.0 * wbar * wbar.dot(seg) - ju);
                ++soc_i;
                break;
            }
            case BlockKind::kPsd: {
                const MatrixXd um = sym_smat(seg, blk.side);
                out.segment(blk.offset, blk.dim) =
                    sym_svec(psd_r[psd_i].transpose() * um * psd_r[psd_i]);
                ++psd_i;
                break;
            }
        }
    }
    return out;
}

VectorXd Scaling::apply_t(const VectorXd& u) const {
    VectorXd out = VectorXd::Zero(u.size());
    int soc_i = 0, psd_i = 0;
    for (const auto& blk : *blocks) {
        const auto seg = u.segment(blk.offset, blk.dim);
        switch (blk.kind) {
            case BlockKind::kOrthant:
                out.segment(blk.offset, blk.dim) = orthant_w.cwiseProduct(seg);
                break;
            case BlockKind::kSoc: {
                // W is symmetric on SOC blocks.
                const auto& wbar = soc_wbar[soc_i];
                const double beta = soc_beta[soc_i];
                VectorXd ju(blk.dim);
                ju(0) = seg(0);
                ju.tail(blk.dim - 1) = -seg.tail(blk.dim - 1);
                out.segment(blk.offset, blk.dim) =
                    beta * (2.0 * wbar * wbar.dot(seg) - ju);
                ++soc_i;
                break;
            }
            case BlockKind::kPsd: {
                const MatrixXd um = sym_smat(seg, blk.side);
                out.segment(blk.offset, blk.dim) =
                    sym_svec(psd_r[psd_i] * um * psd_r[psd_i].transpose());
                ++psd_i;
                break;
            }
        }
    }
    return out;
}

VectorXd Scaling::apply_inv_t(const VectorXd& u) const {
    VectorXd out = VectorXd::Zero(u.size());
    int soc_i = 0, psd_i = 0;
    for (const auto& blk : *blocks) {
        const auto seg = u.segment(blk.offset, blk.dim);
        switch (blk.kind) {
            case BlockKind::kOrthant:
                out.segment(blk.offset, blk.dim) = seg.cwiseQuotient(orthant_w);
                break;
            case BlockKind::kSoc: {
                const auto& wbar = soc_wbar[soc_i];
                const double beta = soc_beta[soc_i];
                VectorXd jw(blk.dim);
                jw(0) = wbar(0);
                jw.tail(blk.dim - 1) = -wbar.tail(blk.dim - 1);
                VectorXd ju(blk.dim);
                ju(0) = seg(0);
                ju.tail(blk.dim - 1) = -seg.tail(blk.dim - 1);
                // W^{-1} = beta^{-1} (2 J wbar wbar' J - J); symmetric.
                out.segment(blk.offset, blk.dim) =
                    (2.0 * jw * wbar.dot(ju) - ju) / beta;
                ++soc_i;
                break;
            }
            case BlockKind::kPsd: {
                const MatrixXd um = sym_smat(seg, blk.side);
                out.segment(blk.offset, blk.dim) =
                    sym_svec(psd_rinv[psd_i] * um * psd_rinv[psd_i].transpose());
                ++psd_i;
                break;
            }
        }
    }
    return out;
}

VectorXd Scaling::apply_wtw_inv(const VectorXd& u) const {
    VectorXd out = VectorXd::Zero(u.size());
    int soc_i = 0, psd_i = 0;
    for (const auto& blk : *blocks) {
        const auto seg = u.segment(blk.offset, blk.dim);
        switch (blk.kind) {
            case BlockKind::kOrthant:
                out.segment(blk.offset, blk.dim) =
                    seg.cwiseQuotient(orthant_w.cwiseProduct(orthant_w));
                break;
            case BlockKind::kSoc: {
                const auto& wbar = soc_wbar[soc_i];
                const double beta = soc_beta[soc_i];
                VectorXd jw(blk.dim);
                jw(0) = wbar(0);
                jw.tail(blk.dim - 1) = -wbar.tail(blk.dim - 1);
                auto winv = [&](const VectorXd& v) {
                    VectorXd jv(blk.dim);
                    jv(0) = v(0);
                    jv.tail(blk.dim - 1) = -v.tail(blk.dim - 1);
                    return VectorXd((2.0 * jw * wbar.dot(jv) - jv) / beta);
                };
                out.segment(blk.offset, blk.dim) = winv(winv(seg));
                ++soc_i;
                break;
            }
            case BlockKind::kPsd: {
                const MatrixXd pinv =
                    psd_rinv[psd_i].transpose() * psd_rinv[psd_i];  // (R R')^{-1}
                const MatrixXd um = sym_smat(seg, blk.side);
                out.segment(blk.offset, blk.dim) = sym_svec(pinv * um * pinv);
                ++psd_i;
                break;
            }
        }
    }
    return out;
}

/// Jordan product x o y in the cone algebra.
VectorXd jordan_product(const std::vector<Block>& blocks, const VectorXd& x,
                        const VectorXd& y) {
    VectorXd out = VectorXd::Zero(x.size());
    for (const auto& blk : blocks) {
        const auto xs = x.segment(blk.offset, blk.dim);
        const auto ys = y.segment(blk.offset, blk.dim);
        switch (blk.kind) {
            case BlockKind::kOrthant:
                out.segment(blk.offset, blk.dim) = xs.cwiseProduct(ys);
                break;
            case BlockKind::kSoc:
                out(blk.offset) = xs.dot(ys);
                out.segment(blk.offset + 1, blk.dim - 1) =
                    xs(0) * ys.tail(blk.dim - 1) + ys(0) * xs.tail(blk.dim - 1);
                break;
            case BlockKind::kPsd: {
                const MatrixXd xm = sym_smat(xs, blk.side);
                const MatrixXd ym = sym_smat(ys, blk.side);
                out.segment(blk.offset, blk.dim) =
                    sym_svec(0.5 * (xm * ym + ym * xm));
                break;
            }
        }
    }
    return out;
}

/// Solves lambda o u = v for u. For PSD blocks lambda must be the NT
/// eigenvalue vector (diagonal in the scaled frame), which is how it is
/// always used here.
VectorXd jordan_solve(const std::vector<Block>& blocks, const Scaling& w,
                      const VectorXd& lambda, const VectorXd& v) {
    VectorXd out = VectorXd::Zero(v.size());
    int psd_i = 0;
    for (const auto& blk : blocks) {
        const auto ls = lambda.segment(blk.offset, blk.dim);
        const auto vs = v.segment(blk.offset, blk.dim);
        switch (blk.kind) {
            case BlockKind::kOrthant:
                out.segment(blk.offset, blk.dim) = vs.cwiseQuotient(ls);
                break;
            case BlockKind::kSoc: {
                const double l0 = ls(0);
                const auto l1 = ls.tail(blk.dim - 1);
                const double det = l0 * l0 - l1.squaredNorm();
                const double u0 = (l0 * vs(0) - l1.dot(vs.tail(blk.dim - 1))) / det;
                out(blk.offset) = u0;
                out.segment(blk.offset + 1, blk.dim - 1) =
                    (vs.tail(blk.dim - 1) - u0 * l1) / l0;
                break;
            }
            case BlockKind::kPsd: {
                const VectorXd& d = w.psd_lambda[psd_i];
                const MatrixXd vm = sym_smat(vs, blk.side);
                MatrixXd um(blk.side, blk.side);
                for (int i = 0; i < blk.side; ++i) {
                    for (int j = 0; j < blk.side; ++j) {
                        um(i, j) = 2.0 * vm(i, j) / (d(i) + d(j));
                    }
                }
                out.segment(blk.offset, blk.dim) = sym_svec(um);
                ++psd_i;
                break;
            }
        }
    }
    return out;
}

/// One factorization of the full (unreduced) KKT system
///   [ 0    A'   G'   ] [dx]   [bx]
///   [ A    0    0    ] [dy] = [by]
///   [ G    0   -W'W  ] [dz]   [bz],
/// solved with pivoted LU plus iterative refinement. Condensing the system
/// onto dx squares the NT-scaling condition number and loses several digits
/// near degenerate optima, so the saddle form is kept intact.
class KktSolver {
public:
    KktSolver(const StandardForm& sf, const std::vector<Block>& blocks)
        : sf_(sf), blocks_(blocks) {}

    bool factor(const Scaling& w) {
        w_ = &w;
        const int n = static_cast<int>(sf_.c.size());
        const int p = static_cast<int>(sf_.b.size());
        const int m = static_cast<int>(sf_.h.size());
        kkt_.setZero(n + p + m, n + p + m);
        if (p > 0) {
            kkt_.block(0, n, n, p) = sf_.A.transpose();
            kkt_.block(n, 0, p, n) = sf_.A;
        }
        kkt_.block(0, n + p, n, m) = sf_.G.transpose();
        kkt_.block(n + p, 0, m, n) = sf_.G;
        VectorXd col = VectorXd::Zero(m);
        for (int j = 0; j < m; ++j) {
            col.setZero();
            col(j) = 1.0;
            kkt_.block(n + p, n + p, m, m).col(j) = -w.apply_t(w.apply(col));
        }
        // Static regularization bounds the condition number of the factored
        // matrix; refinement against the exact matrix restores accuracy.
        // The signs keep the regularized matrix quasi-definite.
        MatrixXd reg = kkt_;
        reg.diagonal().head(n).array() += kRegEps;
        reg.diagonal().tail(p + m).array() -= kRegEps;
        lu_.compute(reg);
        // Partial-pivot LU has no rank signal; probe with a solve.
        const VectorXd probe = VectorXd::Ones(n + p + m);
        return lu_.solve(probe).allFinite();
    }

    /// Solves the 3x3 system with iterative refinement of the exact residual,
    /// keeping the lowest-residual iterate.
    void solve3(const VectorXd& bx, const VectorXd& by, const VectorXd& bz,
                VectorXd& dx, VectorXd& dy, VectorXd& dz) const {
        const int n = static_cast<int>(sf_.c.size());
        const int p = static_cast<int>(sf_.b.size());
        const int m = static_cast<int>(sf_.h.size());
        VectorXd rhs(n + p + m);
        rhs.head(n) = bx;
        rhs.segment(n, p) = by;
        rhs.tail(m) = bz;
        VectorXd sol = lu_.solve(rhs);
        VectorXd best = sol;
        double best_norm = (rhs - kkt_ * sol).norm();
        const double target = 1e-15 * std::max(1.0, rhs.norm());
        for (int round = 0; round < 10 && best_norm > target; ++round) {
            const VectorXd resid = rhs - kkt_ * sol;
            sol += lu_.solve(resid);
            const double norm = (rhs - kkt_ * sol).norm();
            if (norm >= best_norm) break;
            best_norm = norm;
            best = sol;
        }
        dx = best.head(n);
        dy = best.segment(n, p);
        dz = best.tail(m);
    }

private:
    const StandardForm& sf_;
    const std::vector<Block>& blocks_;
    const Scaling* w_ = nullptr;
    MatrixXd kkt_;
    Eigen::PartialPivLU<MatrixXd> lu_;
};

}  // namespace

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::kOptimal: return "optimal";
        case SolveStatus::kInfeasible: return "infeasible";
        case SolveStatus::kUnbounded: return "unbounded";
        case SolveStatus::kNumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

int ConeDims::total_dim() const {
    int m = l;
    for (int d : soc) m += d;
    for (int n : psd) m += n * (n + 1) / 2;
    return m;
}

int ConeDims::degree() const {
    int deg = l + static_cast<int>(soc.size());
    for (int n : psd) deg += n;
    return deg;
}

void StandardForm::check_dims() const {
    const auto n = c.size();
    const auto m = static_cast<Eigen::Index>(cones.total_dim());
    if (A.rows() != b.size() || (A.size() > 0 && A.cols() != n)) {
        throw std::invalid_argument("StandardForm: A/b dimension mismatch");
    }
    if (G.rows() != m || G.cols() != n || h.size() != m) {
        throw std::invalid_argument("StandardForm: G/h/cone dimension mismatch");
    }
    for (int d : cones.soc) {
        if (d < 2) throw std::invalid_argument("StandardForm: SOC dim must be >= 2");
    }
    for (int s : cones.psd) {
        if (s < 1) throw std::invalid_argument("StandardForm: PSD side must be >= 1");
    }
}

VectorXd sym_svec(const MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    VectorXd v(n * (n + 1) / 2);
    const double rt2 = std::sqrt(2.0);
    int idx = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = j; i < n; ++i) {
            v(idx++) = (i == j) ? m(i, j) : rt2 * 0.5 * (m(i, j) + m(j, i));
        }
    }
    return v;
}

MatrixXd sym_smat(const Eigen::Ref<const VectorXd>& v, int n) {
    MatrixXd m(n, n);
    const double irt2 = 1.0 / std::sqrt(2.0);
    int idx = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = j; i < n; ++i) {
            if (i == j) {
                m(i, j) = v(idx);
            } else {
                m(i, j) = v(idx) * irt2;
                m(j, i) = v(idx) * irt2;
            }
            ++idx;
        }
    }
    return m;
}

IpmResult ipm_solve(const StandardForm& sf, const IpmOptions& opts) {
    sf.check_dims();
    const int n = static_cast<int>(sf.c.size());
    const int p = static_cast<int>(sf.b.size());
    const int m = sf.cones.total_dim();
    const auto blocks = make_blocks(sf.cones);
    const VectorXd e = cone_identity(blocks, m);
    const double nu = static_cast<double>(sf.cones.degree());

    IpmResult res;
    if (m == 0) {
        // Equality-constrained LP degenerates; not used by this project.
        throw std::invalid_argument("ipm_solve: empty cone");
    }

    const double resx0 = std::max(1.0, sf.c.norm());
    const double resy0 = std::max(1.0, sf.b.norm());
    const double resz0 = std::max(1.0, sf.h.norm());

    KktSolver kkt(sf, blocks);

    // Initialization: least-norm-ish primal/dual points from an identity
    // scaling solve, shifted into the cone interior.
    VectorXd x, y, z, s;
    {
        Scaling w0;
        // Identity scaling == NT scaling at s = z = e.
        if (!w0.compute(blocks, e, e)) {
            res.status = SolveStatus::kNumericalFailure;
            return res;
        }
        if (!kkt.factor(w0)) {
            res.status = SolveStatus::kNumericalFailure;
            return res;
        }
        VectorXd tmp_z;
        kkt.solve3(VectorXd::Zero(n), sf.b, sf.h, x, y, tmp_z);
        s = sf.h - sf.G * x;
        const double ms = cone_margin(blocks, s);
        if (ms <= 1e-8 * std::max(1.0, s.norm())) {
            s += (1.0 - ms) * e;
        }
        VectorXd xd, yd;
        kkt.solve3(-sf.c, VectorXd::Zero(p), VectorXd::Zero(m), xd, yd, z);
        y = yd;
        const double mz = cone_margin(blocks, z);
        if (mz <= 1e-8 * std::max(1.0, z.norm())) {
            z += (1.0 - mz) * e;
        }
    }
    double tau = 1.0, kappa = 1.0;

    // Best iterate seen, kept as a fallback: near-degenerate optima can lose
    // precision in late iterations before the strict tolerances are met.
    struct BestIterate {
        bool has = false;
        double score = kInfinity;
        VectorXd x, y, z, s;
        double pres = 0, dres = 0, gap = 0, relgap = 0, pcost = 0, dcost = 0;
    } best;
    double progress_ref = kInfinity;
    int last_progress = 0;

    auto finish_failure = [&](IpmResult& r) -> IpmResult {
        if (best.has && best.pres <= opts.acceptable_tol &&
            best.dres <= opts.acceptable_tol &&
            (best.gap <= opts.acceptable_tol || best.relgap <= opts.acceptable_tol)) {
            r.status = SolveStatus::kOptimal;
            r.x = best.x;
            r.y = best.y;
            r.z = best.z;
            r.s = best.s;
            r.pres = best.pres;
            r.dres = best.dres;
            r.gap = best.gap;
            r.relgap = best.relgap;
            r.primal_obj = best.pcost;
            r.dual_obj = best.dcost;
        } else {
            r.status = SolveStatus::kNumericalFailure;
        }
        return r;
    };

    Scaling w;
    for (int iter = 0; iter <= opts.max_iters; ++iter) {
        const VectorXd rx = sf.A.transpose() * y + sf.G.transpose() * z + sf.c * tau;
        const VectorXd ry = sf.A * x - sf.b * tau;
        const VectorXd rz = sf.G * x + s - sf.h * tau;
        const double rt = sf.c.dot(x) + sf.b.dot(y) + sf.h.dot(z) + kappa;

        const double pcost = sf.c.dot(x) / tau;
        const double dcost = -(sf.b.dot(y) + sf.h.dot(z)) / tau;
        const double gap = s.dot(z) / (tau * tau);
        const double relgap = gap / std::max(1.0, std::abs(pcost));
        const double pres = std::max(ry.norm() / resy0, rz.norm() / resz0) / tau;
        const double dres = rx.norm() / resx0 / tau;

        res.iterations = iter;
        res.pres = pres;
        res.dres = dres;
        res.gap = gap;
        res.relgap = relgap;
        res.primal_obj = pcost;
        res.dual_obj = dcost;

        if (std::getenv("SECBEAM_IPM_TRACE") != nullptr) {
            std::fprintf(stderr,
                         "it=%2d pcost=%+.6e dcost=%+.6e gap=%.3e pres=%.3e "
                         "dres=%.3e tau=%.3e kappa=%.3e\n",
                         iter, pcost, dcost, gap, pres, dres, tau, kappa);
        }

        if (pres <= opts.feastol && dres <= opts.feastol &&
            (gap <= opts.abstol || relgap <= opts.reltol)) {
            res.status = SolveStatus::kOptimal;
            res.x = x / tau;
            res.y = y / tau;
            res.z = z / tau;
            res.s = s / tau;
            return res;
        }

        const double score = std::max({pres, dres, std::min(gap, relgap)});
        if (score < best.score) {
            best.has = true;
            best.score = score;
            best.x = x / tau;
            best.y = y / tau;
            best.z = z / tau;
            best.s = s / tau;
            best.pres = pres;
            best.dres = dres;
            best.gap = gap;
            best.relgap = relgap;
            best.pcost = pcost;
            best.dcost = dcost;
        }
        // Roundoff bounds the reachable residual on badly scaled solutions;
        // once meaningful progress stops, the best iterate is final.
        if (score < 0.9 * progress_ref) {
            progress_ref = score;
            last_progress = iter;
        } else if (iter - last_progress >= kStallWindow) {
            return finish_failure(res);
        }

        const double hz_by = sf.h.dot(z) + sf.b.dot(y);
        if (hz_by < 0.0) {
            const double scale = -hz_by;
            const double pinfres =
                (sf.A.transpose() * (y / scale) + sf.G.transpose() * (z / scale)).norm() /
                resx0;
            if (pinfres <= opts.feastol) {
                res.status = SolveStatus::kInfeasible;
                res.y = y / scale;
                res.z = z / scale;
                return res;
            }
        }
        const double cx = sf.c.dot(x);
        if (cx < 0.0) {
            const double scale = -cx;
            const double dinfres =
                std::max((sf.A * (x / scale)).norm() / resy0,
                         (sf.G * (x / scale) + s / scale).norm() / resz0);
            if (dinfres <= opts.feastol) {
                res.status = SolveStatus::kUnbounded;
                res.x = x / scale;
                res.s = s / scale;
                return res;
            }
        }

        if (iter == opts.max_iters) break;

        if (!w.compute(blocks, s, z)) {
            return finish_failure(res);
        }
        if (!kkt.factor(w)) {
            return finish_failure(res);
        }
        const VectorXd& lambda = w.lambda;
        const VectorXd lambda_sq = jordan_product(blocks, lambda, lambda);
        const double mu = (s.dot(z) + tau * kappa) / (nu + 1.0);

        VectorXd vx, vy, vz;
        kkt.solve3(-sf.c, sf.b, sf.h, vx, vy, vz);
        const double den =
            sf.c.dot(vx) + sf.b.dot(vy) + sf.h.dot(vz) - kappa / tau;
        if (!std::isfinite(den) || std::abs(den) < 1e-300) {
            return finish_failure(res);
        }

        auto direction = [&](const VectorXd& ds_rhs, double dkappa_rhs, double eta,
                             VectorXd& dx, VectorXd& dy, VectorXd& dz, VectorXd& ds,
                             double& dtau, double& dkappa) {
            const VectorXd bx = -eta * rx;
            const VectorXd by = -eta * ry;
            const VectorXd bz = -eta * rz;
            const double bt = -eta * rt;
            const VectorXd lam_inv_ds = jordan_solve(blocks, w, lambda, ds_rhs);
            const VectorXd bz_tilde = bz - w.apply_t(lam_inv_ds);
            VectorXd ux, uy, uz;
            kkt.solve3(bx, by, bz_tilde, ux, uy, uz);
            dtau = (bt - dkappa_rhs / tau -
                    (sf.c.dot(ux) + sf.b.dot(uy) + sf.h.dot(uz))) /
                   den;
            dx = ux + dtau * vx;
            dy = uy + dtau * vy;
            dz = uz + dtau * vz;
            ds = w.apply_t(lam_inv_ds - w.apply(dz));
            dkappa = (dkappa_rhs - kappa * dtau) / tau;
        };

        // Affine (predictor) direction.
        VectorXd dxa, dya, dza, dsa;
        double dtaua, dkappaa;
        direction(-lambda_sq, -tau * kappa, 1.0, dxa, dya, dza, dsa, dtaua, dkappaa);

        double alpha_aff = std::min(1.0, max_step(blocks, s, dsa));
        alpha_aff = std::min(alpha_aff, max_step(blocks, z, dza));
        if (dtaua < 0.0) alpha_aff = std::min(alpha_aff, -tau / dtaua);
        if (dkappaa < 0.0) alpha_aff = std::min(alpha_aff, -kappa / dkappaa);

        const double sigma = std::pow(1.0 - std::min(1.0, alpha_aff), 3.0);

        // Combined (corrector) direction.
        const VectorXd correction = jordan_product(
            blocks, w.apply_inv_t(dsa), w.apply(dza));
        const VectorXd ds_rhs = -lambda_sq - correction + sigma * mu * e;
        const double dkappa_rhs = -tau * kappa - dtaua * dkappaa + sigma * mu;
        VectorXd dx, dy, dz, ds;
        double dtau, dkappa;
        direction(ds_rhs, dkappa_rhs, 1.0 - sigma, dx, dy, dz, ds, dtau, dkappa);

        double alpha = max_step(blocks, s, ds);
        alpha = std::min(alpha, max_step(blocks, z, dz));
        if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
        if (dkappa < 0.0) alpha = std::min(alpha, -kappa / dkappa);
        alpha = std::min(1.0, kStepFraction * alpha);
        if (std::getenv("SECBEAM_IPM_TRACE") != nullptr) {
            std::fprintf(stderr, "      alpha_aff=%.3e sigma=%.3e alpha=%.3e\n",
                         alpha_aff, sigma, alpha);
        }
        if (!std::isfinite(alpha) || alpha <= 1e-13) {
            return finish_failure(res);
        }

        x += alpha * dx;
        y += alpha * dy;
        z += alpha * dz;
        s += alpha * ds;
        tau += alpha * dtau;
        kappa += alpha * dkappa;
        if (tau <= 0.0 || kappa <= 0.0 || !x.allFinite() || !s.allFinite()) {
            return finish_failure(res);
        }
    }

    return finish_failure(res);
}

}  // namespace secbeam::conic

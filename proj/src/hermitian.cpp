#include "secbeam/hermitian.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "secbeam/kernels.hpp"

namespace secbeam::herm {

MatrixXcd symmetrize(const MatrixXcd& h) {
    return 0.5 * (h + h.adjoint());
}

bool is_hermitian(const MatrixXcd& h, double tol) {
    if (h.rows() != h.cols()) return false;
    const double scale = std::max(1.0, h.norm());
    return (h - h.adjoint()).norm() <= tol * scale;
}

MatrixXd embed_real(const MatrixXcd& h) {
    if (!is_hermitian(h)) {
        throw std::invalid_argument("embed_real: input is not Hermitian");
    }
    const Eigen::Index n = h.rows();
    MatrixXd t(2 * n, 2 * n);
    const MatrixXd re = h.real();
    const MatrixXd im = h.imag();
    t.topLeftCorner(n, n) = re;
    t.topRightCorner(n, n) = -im;
    t.bottomLeftCorner(n, n) = im;
    t.bottomRightCorner(n, n) = re;
    return t;
}

double quadratic_form(const VectorXcd& h, const MatrixXcd& m) {
    if (m.rows() != m.cols() || m.rows() != h.size()) {
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    }
    return kernels::quad_form(h.data(), m.data(), static_cast<int>(h.size()));
}

int numerical_rank(const MatrixXcd& h, double rel_tol) {
    if (rel_tol <= 0.0 || rel_tol >= 1.0) {
        throw std::invalid_argument("numerical_rank: rel_tol must be in (0,1)");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(symmetrize(h), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double lmax = ev.maxCoeff();
    if (lmax <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > rel_tol * lmax) ++rank;
    }
    return rank;
}

MatrixXcd psd_sqrt(const MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(symmetrize(h));
    Eigen::VectorXd ev = es.eigenvalues();
    const double lmax = std::max(0.0, ev.maxCoeff());
    const double clamp = -1e-9 * std::max(lmax, 1e-300);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < clamp) {
            throw std::invalid_argument("psd_sqrt: input is indefinite beyond clamp tolerance");
        }
        ev(i) = std::max(ev(i), 0.0);
    }
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace secbeam::herm

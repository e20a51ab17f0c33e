#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <vector>

#include "secbeam/hermitian.hpp"
#include "secbeam/random.hpp"

using namespace secbeam;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

namespace {

MatrixXcd random_hermitian(GaussianRng& rng, int n) {
    MatrixXcd a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = rng.cscg(1.0);
    return herm::symmetrize(a);
}

MatrixXcd random_psd(GaussianRng& rng, int n, int rank) {
    MatrixXcd f(n, rank);
    for (int j = 0; j < rank; ++j)
        for (int i = 0; i < n; ++i) f(i, j) = rng.cscg(1.0);
    return f * f.adjoint();
}

VectorXcd random_vector(GaussianRng& rng, int n) {
    VectorXcd h(n);
    for (int i = 0; i < n; ++i) h(i) = rng.cscg(1.0);
    return h;
}

}  // namespace

TEST_CASE("embedding of the identity is the doubled identity") {
    const MatrixXcd eye = MatrixXcd::Identity(4, 4);
    const MatrixXd t = herm::embed_real(eye);
    CHECK((t - MatrixXd::Identity(8, 8)).norm() == 0.0);
}

TEST_CASE("embedding of the 2x2 purely imaginary pauli form") {
    MatrixXcd h(2, 2);
    h << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    const MatrixXd t = herm::embed_real(h);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
    const Eigen::VectorXd ev = es.eigenvalues();  // ascending
    CHECK(ev(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ev(1) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ev(2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev(3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("embedding doubles every eigenvalue") {
    GaussianRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 5;
        const MatrixXcd h = random_hermitian(rng, n);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eh(h);
        Eigen::SelfAdjointEigenSolver<MatrixXd> et(herm::embed_real(h));
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(et.eigenvalues()(2 * i) - eh.eigenvalues()(i)) < 1e-10);
            CHECK(std::abs(et.eigenvalues()(2 * i + 1) - eh.eigenvalues()(i)) < 1e-10);
        }
        CHECK(herm::embed_real(h).trace() ==
              doctest::Approx(2.0 * h.real().trace()).epsilon(1e-12));
    }
}

TEST_CASE("embedding is linear and preserves definiteness") {
    GaussianRng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const MatrixXcd a = random_hermitian(rng, 4);
        const MatrixXcd b = random_hermitian(rng, 4);
        const double al = 0.7, be = -1.3;
        const MatrixXd lhs = herm::embed_real(al * a + be * b);
        const MatrixXd rhs = al * herm::embed_real(a) + be * herm::embed_real(b);
        CHECK((lhs - rhs).norm() < 1e-12 * std::max(1.0, rhs.norm()));

        const MatrixXcd psd = random_psd(rng, 4, 2);
        Eigen::SelfAdjointEigenSolver<MatrixXd> et(herm::embed_real(psd));
        CHECK(et.eigenvalues().minCoeff() > -1e-10 * et.eigenvalues().maxCoeff());

        // An indefinite input must embed to an indefinite matrix.
        MatrixXcd indef = psd;
        indef -= 2.0 * psd.real().trace() * MatrixXcd::Identity(4, 4);
        Eigen::SelfAdjointEigenSolver<MatrixXd> ei(herm::embed_real(indef));
        CHECK(ei.eigenvalues().minCoeff() < 0.0);
    }
}

TEST_CASE("embedding rejects non-hermitian input") {
    MatrixXcd bad(2, 2);
    bad << cplx(1, 0), cplx(1, 0), cplx(0, 0), cplx(1, 0);
    CHECK_THROWS(herm::embed_real(bad));
}

TEST_CASE("quadratic form fixed points") {
    GaussianRng rng(13);
    const VectorXcd h = random_vector(rng, 5);
    CHECK(herm::quadratic_form(h, MatrixXcd::Identity(5, 5)) ==
          doctest::Approx(h.squaredNorm()).epsilon(1e-12));
    const MatrixXcd proj = h * h.adjoint();
    CHECK(herm::quadratic_form(h, proj) ==
          doctest::Approx(h.squaredNorm() * h.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("quadratic form matches naive triple product") {
    GaussianRng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 6;
        const VectorXcd h = random_vector(rng, n);
        const MatrixXcd m = random_hermitian(rng, n);
        cplx acc(0, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) acc += std::conj(h(i)) * m(i, j) * h(j);
        CHECK(std::abs(herm::quadratic_form(h, m) - acc.real()) < 1e-10);
        CHECK(std::abs(acc.imag()) < 1e-10);
    }
}

TEST_CASE("quadratic form rejects dimension mismatch") {
    GaussianRng rng(15);
    CHECK_THROWS(herm::quadratic_form(random_vector(rng, 3),
                                      MatrixXcd::Identity(4, 4)));
}

TEST_CASE("numerical rank thresholding") {
    GaussianRng rng(16);
    const VectorXcd q = random_vector(rng, 5);
    CHECK(herm::numerical_rank(q * q.adjoint()) == 1);
    CHECK(herm::numerical_rank(MatrixXcd::Zero(4, 4)) == 0);

    MatrixXcd d = MatrixXcd::Zero(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 1e-9;
    CHECK(herm::numerical_rank(d, 1e-6) == 1);
    CHECK(herm::numerical_rank(d, 1e-10) == 2);

    const VectorXcd w = random_vector(rng, 5);
    CHECK(herm::numerical_rank(q * q.adjoint() + w * w.adjoint()) <= 2);
}

TEST_CASE("psd square root reconstructs the input") {
    GaussianRng rng(17);
    const MatrixXcd eye = MatrixXcd::Identity(3, 3);
    CHECK((herm::psd_sqrt(eye) - eye).norm() < 1e-12);

    const VectorXcd q = random_vector(rng, 4);
    const MatrixXcd rank1 = q * q.adjoint();
    const MatrixXcd s1 = herm::psd_sqrt(rank1);
    CHECK((s1 * s1.adjoint() - rank1).norm() / rank1.norm() < 1e-8);

    for (int trial = 0; trial < 10; ++trial) {
        const MatrixXcd h = random_psd(rng, 5, 3);
        const MatrixXcd s = herm::psd_sqrt(h);
        CHECK((s * s.adjoint() - h).norm() / h.norm() < 1e-8);
    }
}

TEST_CASE("psd square root rejects indefinite input") {
    MatrixXcd indef = MatrixXcd::Identity(3, 3);
    indef(2, 2) = -0.5;
    CHECK_THROWS(herm::psd_sqrt(indef));
}

TEST_CASE("symmetrize and hermitian check") {
    GaussianRng rng(18);
    MatrixXcd a(3, 3);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) a(i, j) = rng.cscg(1.0);
    const MatrixXcd s = herm::symmetrize(a);
    CHECK(herm::is_hermitian(s));
    CHECK_FALSE(herm::is_hermitian(a));
    CHECK((s - s.adjoint()).norm() < 1e-15 * s.norm());
}

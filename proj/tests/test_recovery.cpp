#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "secbeam/harness.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/model.hpp"
#include "secbeam/random.hpp"
#include "secbeam/recovery.hpp"

using namespace secbeam;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

VectorXcd random_vector(GaussianRng& rng, int n) {
    VectorXcd h(n);
    for (int i = 0; i < n; ++i) h(i) = rng.cscg(1.0);
    return h;
}

MatrixXcd random_psd(GaussianRng& rng, int n, int rank, double trace) {
    MatrixXcd f(n, rank);
    for (int j = 0; j < rank; ++j)
        for (int i = 0; i < n; ++i) f(i, j) = rng.cscg(1.0);
    MatrixXcd m = f * f.adjoint();
    return m * (trace / m.real().trace());
}

}  // namespace

TEST_CASE("rank predicate on rank-one pairs") {
    GaussianRng rng(61);
    const VectorXcd q = random_vector(rng, 5);
    const VectorXcd w = random_vector(rng, 5);
    const recovery::RecoveryReport rep = recovery::check_proposition1(
        q * q.adjoint(), w * w.adjoint(), 3, 3);
    CHECK(rep.rank_q == 1);
    CHECK(rep.rank_v == 1);
    CHECK(rep.prop1_holds);  // 1 + 1 <= 2*3 + 3
}

TEST_CASE("rank predicate rejects oversized information rank") {
    GaussianRng rng(62);
    const MatrixXcd q4 = random_psd(rng, 5, 4, 1.0);  // rank K+1 for K=3
    const MatrixXcd v1 = random_psd(rng, 5, 1, 1.0);
    const recovery::RecoveryReport rep = recovery::check_proposition1(q4, v1, 3, 3);
    CHECK(rep.rank_q == 4);
    CHECK_FALSE(rep.prop1_holds);

    // rank_q <= K alone is not enough: the squared-rank budget also binds.
    const MatrixXcd q3 = random_psd(rng, 5, 3, 1.0);
    const MatrixXcd v2 = random_psd(rng, 5, 2, 1.0);
    const recovery::RecoveryReport tight = recovery::check_proposition1(q3, v2, 3, 3);
    CHECK(tight.rank_q == 3);
    CHECK(tight.rank_v == 2);
    CHECK_FALSE(tight.prop1_holds);  // 9 + 4 > 9
}

TEST_CASE("principal factor of a scaled coordinate projector") {
    MatrixXcd m = MatrixXcd::Zero(3, 3);
    m(0, 0) = 4.0;
    const VectorXcd q = recovery::extract_rank_one(m);
    CHECK(std::abs(q(0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(q(1)) < 1e-12);
    CHECK(std::abs(q(2)) < 1e-12);
}

TEST_CASE("principal factor reconstructs random rank-one inputs") {
    GaussianRng rng(63);
    for (int trial = 0; trial < 20; ++trial) {
        const VectorXcd v = random_vector(rng, 4);
        const MatrixXcd m = v * v.adjoint();
        const VectorXcd q = recovery::extract_rank_one(m);
        CHECK((q * q.adjoint() - m).norm() / m.norm() < 1e-6);
    }
    CHECK_THROWS(recovery::extract_rank_one(random_psd(rng, 4, 2, 1.0)));
}

TEST_CASE("beamformer and covariance evaluations agree") {
    model::SystemParams p;
    GaussianRng rng(64);
    const model::ChannelSet ch = model::generate_channels(p, 5);
    const VectorXcd v = random_vector(rng, p.n_tx) * 0.1;

    metrics::TransmitDesign cov;
    cov.q_cov = v * v.adjoint();
    cov.an_cov = random_psd(rng, p.n_tx, 2, 0.05);
    cov.rho.assign(p.n_users, 0.7);

    const VectorXcd q = recovery::extract_rank_one(cov.q_cov);
    metrics::TransmitDesign beam = cov;
    beam.q_cov = q * q.adjoint();
    beam.beamformer = q;

    for (int k = 0; k < p.n_users; ++k) {
        CHECK(std::abs(metrics::user_rate(ch.h_users[k], cov, k, p) -
                       metrics::user_rate(ch.h_users[k], beam, k, p)) < 1e-9);
    }
}

TEST_CASE("randomization never regresses and stays feasible") {
    model::SystemParams p;
    p.p_total = model::dbm_to_watts(30.0);
    p.e_bar_s = p.e_bar_e = model::dbm_to_watts(0.0);
    GaussianRng rng(65);
    const model::ChannelSet ch = model::generate_channels(p, 6);

    const MatrixXcd q_cov = random_psd(rng, p.n_tx, 3, 0.7 * p.p_total);
    const MatrixXcd an_cov = random_psd(rng, p.n_tx, 2, 0.3 * p.p_total);
    const std::vector<double> rho(p.n_users, 0.5);

    metrics::TransmitDesign sdr;
    sdr.q_cov = q_cov;
    sdr.an_cov = an_cov;
    sdr.rho = rho;
    const double sdr_rate =
        metrics::achievable_secrecy_rate(sdr, ch, p).secrecy_rate;

    auto [design, rep] =
        recovery::gaussian_randomization(q_cov, an_cov, rho, p, ch, 50, 77);
    CHECK(rep.best_rate >= sdr_rate);
    CHECK(rep.n_candidates_tried == 51);  // principal candidate plus n_rand

    if (rep.n_feasible > 0) {
        REQUIRE(design.beamformer.has_value());
        CHECK_NOTHROW(design.validate(p));
        for (int k = 0; k < p.n_users; ++k) {
            CHECK(metrics::user_energy(ch.h_users[k], design, k, p) >=
                  p.e_bar_s - 1e-9);
            CHECK(design.rho[k] >= metrics::kRhoEps);
            CHECK(design.rho[k] <= 1.0);
        }
        for (int l = 0; l < p.n_eves; ++l) {
            CHECK(metrics::eve_energy(ch.h_eves[l], design.q_cov, design.an_cov,
                                      p) >= p.e_bar_e - 1e-9);
        }
        const double power =
            design.q_cov.real().trace() + design.an_cov.real().trace();
        CHECK(power <= p.p_total + metrics::kDesignTol);
    }
}

TEST_CASE("randomization on a rank-one input keeps the direct rate") {
    model::SystemParams p;
    p.e_bar_s = p.e_bar_e = 0.0;
    GaussianRng rng(66);
    const model::ChannelSet ch = model::generate_channels(p, 7);
    const VectorXcd v = random_vector(rng, p.n_tx);
    const MatrixXcd q_cov = (0.6 * p.p_total / v.squaredNorm()) * (v * v.adjoint());
    const MatrixXcd an_cov = random_psd(rng, p.n_tx, 2, 0.3 * p.p_total);
    const std::vector<double> rho(p.n_users, 1.0);

    metrics::TransmitDesign sdr;
    sdr.q_cov = q_cov;
    sdr.an_cov = an_cov;
    sdr.rho = rho;
    const double sdr_rate =
        metrics::achievable_secrecy_rate(sdr, ch, p).secrecy_rate;

    auto [design, rep] =
        recovery::gaussian_randomization(q_cov, an_cov, rho, p, ch, 20, 5);
    // The deterministic principal candidate reproduces the rank-one input.
    CHECK(rep.best_rate >= sdr_rate - 1e-9);
    CHECK(rep.n_feasible >= 1);
}

TEST_CASE("randomization is reproducible and monotone in the budget") {
    model::SystemParams p;
    p.p_total = model::dbm_to_watts(30.0);
    p.e_bar_s = p.e_bar_e = model::dbm_to_watts(0.0);
    GaussianRng rng(67);
    const model::ChannelSet ch = model::generate_channels(p, 8);
    const MatrixXcd q_cov = random_psd(rng, p.n_tx, 3, 0.7 * p.p_total);
    const MatrixXcd an_cov = random_psd(rng, p.n_tx, 2, 0.3 * p.p_total);
    const std::vector<double> rho(p.n_users, 0.6);

    auto [d1, r1] =
        recovery::gaussian_randomization(q_cov, an_cov, rho, p, ch, 100, 42);
    auto [d2, r2] =
        recovery::gaussian_randomization(q_cov, an_cov, rho, p, ch, 100, 42);
    CHECK(r1.best_rate == r2.best_rate);
    CHECK(r1.n_feasible == r2.n_feasible);
    CHECK((d1.q_cov - d2.q_cov).norm() == 0.0);

    // Same seed, growing budget: candidate streams are nested prefixes.
    double prev = -1.0;
    for (int n_rand : {10, 25, 50, 100}) {
        auto [d, r] =
            recovery::gaussian_randomization(q_cov, an_cov, rho, p, ch, n_rand, 42);
        CHECK(r.best_rate >= prev);
        prev = r.best_rate;
    }
}

TEST_CASE("zero feasible candidates fall back to the covariance design") {
    model::SystemParams p;
    p.n_users = 1;
    p.e_bar_s = 1.0;  // unreachable user floor rejects every candidate
    GaussianRng rng(68);
    const model::ChannelSet ch = model::generate_channels(p, 9);
    const MatrixXcd q_cov = random_psd(rng, p.n_tx, 2, 0.5 * p.p_total);
    const MatrixXcd an_cov = random_psd(rng, p.n_tx, 1, 0.2 * p.p_total);
    const std::vector<double> rho(p.n_users, 0.5);

    auto [design, rep] =
        recovery::gaussian_randomization(q_cov, an_cov, rho, p, ch, 20, 3);
    CHECK(rep.n_feasible == 0);  // the warning flag for the fallback path
    CHECK_FALSE(design.beamformer.has_value());
    CHECK((design.q_cov - q_cov).norm() < 1e-12 * q_cov.norm());
    CHECK(design.rho == rho);

    CHECK_THROWS(recovery::gaussian_randomization(q_cov, an_cov, rho, p, ch, 0, 3));
}

TEST_CASE("recovered rate respects the relaxation bound") {
    model::SystemParams p;
    p.n_tx = 3;
    p.n_users = 2;
    p.n_eves = 1;
    p.n_eve_rx = 1;
    p.p_total = model::dbm_to_watts(10.0);
    p.e_bar_s = p.e_bar_e = model::dbm_to_watts(-30.0);
    const model::ChannelSet ch = model::generate_channels(p, mix_seed(9, 1));
    const harness::InstanceResult res =
        harness::solve_instance(p, ch, {12, 4}, 50, 4);
    REQUIRE(res.feasible);
    CHECK(res.recovery.best_rate <= res.rate_upper + 1e-6);
    CHECK(res.rate_sdr <= res.rate_sdr_gr + 1e-12);
    CHECK(recovery::to_string(res.recovery.method).size() > 0);
}

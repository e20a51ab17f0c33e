#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <vector>

#include "secbeam/hermitian.hpp"
#include "secbeam/inner.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/model.hpp"
#include "secbeam/outer.hpp"
#include "secbeam/random.hpp"

using namespace secbeam;
using conic::SolveStatus;
using Eigen::MatrixXcd;

namespace {

model::SystemParams paper_params() {
    model::SystemParams p;  // defaults carry the reference dimensions
    p.p_total = model::dbm_to_watts(30.0);
    p.e_bar_s = model::dbm_to_watts(0.0);
    p.e_bar_e = model::dbm_to_watts(0.0);
    return p;
}

model::SystemParams tiny_params() {
    model::SystemParams p;
    p.n_tx = 2;
    p.n_users = 1;
    p.n_eves = 1;
    p.n_eve_rx = 1;
    p.p_total = model::dbm_to_watts(10.0);
    p.e_bar_s = model::dbm_to_watts(-30.0);
    p.e_bar_e = model::dbm_to_watts(-30.0);
    return p;
}

/// Raw-units residual suite for a recovered design at a fixed t. Violations
/// are relative to each constraint's own scale; returns the worst one.
double design_violation(const model::SystemParams& p,
                        const model::ChannelSet& ch,
                        const metrics::TransmitDesign& d, double t) {
    double worst = 0.0;
    for (int k = 0; k < p.n_users; ++k) {
        const double e = metrics::user_energy(ch.h_users[k], d, k, p);
        worst = std::max(worst, (p.e_bar_s - e) /
                                    std::max(p.e_bar_s, p.sigma2_sa));
    }
    for (int l = 0; l < p.n_eves; ++l) {
        const double e = metrics::eve_energy(ch.h_eves[l], d.q_cov, d.an_cov, p);
        worst = std::max(worst, (p.e_bar_e - e) /
                                    std::max(p.e_bar_e, p.sigma2_ea));
    }
    const double power = d.q_cov.real().trace() + d.an_cov.real().trace();
    worst = std::max(worst, (power - p.p_total) / p.p_total);
    for (double r : d.rho) {
        worst = std::max(worst, -r);
        worst = std::max(worst, r - 1.0);
    }
    const double leak = (t == 1.0) ? 0.0 : (1.0 / t - 1.0);
    for (int l = 0; l < p.n_eves; ++l) {
        const MatrixXcd& hm = ch.h_eves[l];
        const MatrixXcd shield =
            leak * (hm.adjoint() * d.an_cov * hm +
                    p.sigma2_e() * MatrixXcd::Identity(p.n_eve_rx, p.n_eve_rx));
        const MatrixXcd exposed = hm.adjoint() * d.q_cov * hm;
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
            herm::symmetrize(shield - exposed));
        const double scale = std::max(1e-12, shield.norm() + exposed.norm() +
                                                 hm.squaredNorm() * power);
        worst = std::max(worst, -es.eigenvalues().minCoeff() / scale);
    }
    return worst;
}

}  // namespace

TEST_CASE("builder emits the expected cone structure") {
    const model::SystemParams p = paper_params();  // K=3, L=3, N_E=2, N_T=5
    const model::ChannelSet ch = model::generate_channels(p, 7);
    conic::ConicProgram prog = inner::build_inner(p, ch, 0.5);
    const conic::StandardForm sf = prog.standard_form();

    // Variables: two n_tx^2 Hermitian blocks + rho, slack (K each) + xi, theta.
    CHECK(prog.num_vars() == 2 * p.n_tx * p.n_tx + 2 * p.n_users + 2);
    // K per-user normalization equalities.
    CHECK(sf.b.size() == p.n_users);
    // Nonnegative rows: K signal floors, L eve energy floors, 1 power,
    // K split lower bounds, K split-vs-xi gaps, 1 xi floor, 1 theta sign.
    CHECK(sf.cones.l == 3 * p.n_users + p.n_eves + 3);
    // 2K rotated cones (split surrogate + user energy), each of dimension 3.
    REQUIRE(sf.cones.soc.size() == 2 * static_cast<std::size_t>(p.n_users));
    for (int d : sf.cones.soc) CHECK(d == 3);
    // Two embedded n_tx variables plus one embedded N_E block per eve.
    REQUIRE(sf.cones.psd.size() == 2 + static_cast<std::size_t>(p.n_eves));
    CHECK(sf.cones.psd[0] == 2 * p.n_tx);
    CHECK(sf.cones.psd[1] == 2 * p.n_tx);
    for (std::size_t l = 2; l < sf.cones.psd.size(); ++l) {
        CHECK(sf.cones.psd[l] == 2 * p.n_eve_rx);
    }

    CHECK_THROWS(inner::build_inner(p, ch, 0.0));
    CHECK_THROWS(inner::build_inner(p, ch, 1.2));
    CHECK_THROWS(inner::build_inner(p, ch, -0.5));
}

TEST_CASE("full split endpoint forces zero leakage") {
    model::SystemParams p = tiny_params();
    p.e_bar_s = p.e_bar_e = 0.0;  // keep t=1 feasible
    const model::ChannelSet ch = model::generate_channels(p, mix_seed(1, 0));
    const inner::InnerSolution sol = inner::solve_inner(p, ch, 1.0);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.theta > 0.0);
    const metrics::TransmitDesign d = inner::recover_design(sol);
    // The eavesdropper block degenerates to zero received signal power.
    CHECK(metrics::eve_rate_upper(ch.h_eves[0], d.q_cov, d.an_cov, p) < 1e-6);
}

TEST_CASE("unreachable eavesdropper energy floor is infeasible") {
    const model::SystemParams base = tiny_params();
    const model::ChannelSet ch = model::generate_channels(base, mix_seed(2, 0));

    // Eve harvest is at most eta * (P * lambda_max(H H^H) + N_E sigma2_ea).
    double cap = 0.0;
    for (const auto& hm : ch.h_eves) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hm * hm.adjoint());
        cap = std::max(cap, base.eta_e * (base.p_total *
                                              es.eigenvalues().maxCoeff() +
                                          base.n_eve_rx * base.sigma2_ea));
    }
    model::SystemParams p = base;
    p.e_bar_e = 2.0 * cap;
    p.e_bar_s = 0.0;
    const inner::InnerSolution sol = inner::solve_inner(p, ch, 0.5);
    CHECK(sol.status == SolveStatus::kInfeasible);
}

TEST_CASE("inner value is non-increasing in t") {
    const model::SystemParams p = tiny_params();
    for (int i = 0; i < 3; ++i) {
        const model::ChannelSet ch = model::generate_channels(p, mix_seed(3, i));
        const double tmin = outer::t_lower_bound(p, ch);
        double prev = 0.0;
        bool have_prev = false;
        for (int g = 0; g < 10; ++g) {
            const double t = std::exp(std::log(tmin) * (1.0 - g / 9.0));
            const inner::InnerSolution sol = inner::solve_inner(p, ch, t);
            if (sol.status != SolveStatus::kOptimal) {
                have_prev = false;
                continue;
            }
            if (have_prev) {
                CHECK(sol.theta <= prev + 1e-6 * std::max(1.0, prev));
            }
            prev = sol.theta;
            have_prev = true;
        }
    }
}

TEST_CASE("grid best matches the exhaustive reference") {
    const model::SystemParams p = tiny_params();
    const model::ChannelSet ch = model::generate_channels(p, mix_seed(1, 0));
    const double oracle = 4.635788;  // frozen from the exhaustive search
    double best = 0.0;
    const double tmin = outer::t_lower_bound(p, ch);
    for (int g = 0; g < 24; ++g) {
        const double t = std::exp(std::log(tmin) * (1.0 - g / 23.0));
        const inner::InnerSolution sol = inner::solve_inner(p, ch, t);
        if (sol.status != SolveStatus::kOptimal) continue;
        best = std::max(best, std::log2(1.0 + sol.theta) + std::log2(t));
    }
    CHECK(std::abs(best - oracle) < 0.05);
}

TEST_CASE("recovered designs satisfy the untransformed constraints") {
    const model::SystemParams p = paper_params();
    for (int i = 0; i < 5; ++i) {
        const model::ChannelSet ch = model::generate_channels(p, mix_seed(4, i));
        const inner::InnerSolution sol = inner::solve_inner(p, ch, 0.6);
        if (sol.status != SolveStatus::kOptimal) continue;
        const metrics::TransmitDesign d = inner::recover_design(sol);
        CHECK(design_violation(p, ch, d, 0.6) < 1e-6);
        CHECK_NOTHROW(d.validate(p));

        // Splits stay inside (0, xi] in transformed units.
        for (int k = 0; k < sol.rho_t.size(); ++k) {
            CHECK(sol.rho_t(k) > 0.0);
            CHECK(sol.rho_t(k) <= sol.xi * (1.0 + 1e-9));
        }
        CHECK(sol.xi > 0.0);
    }
}

TEST_CASE("objective equals the worst user signal power") {
    const model::SystemParams p = paper_params();
    const model::ChannelSet ch = model::generate_channels(p, 11);
    const inner::InnerSolution sol = inner::solve_inner(p, ch, 0.6);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    double min_q = 1e300;
    for (const auto& h : ch.h_users) {
        min_q = std::min(min_q, herm::quadratic_form(h, sol.q_cov_t));
    }
    CHECK(std::abs(sol.theta - min_q) <= 1e-6 * std::max(1.0, sol.theta));
}

TEST_CASE("recovered worst-user sinr preserves the inner value") {
    const model::SystemParams p = paper_params();
    for (int i = 0; i < 3; ++i) {
        const model::ChannelSet ch = model::generate_channels(p, mix_seed(5, i));
        const inner::InnerSolution sol = inner::solve_inner(p, ch, 0.6);
        if (sol.status != SolveStatus::kOptimal) continue;
        const metrics::TransmitDesign d = inner::recover_design(sol);
        const metrics::DesignReport rep = metrics::achievable_secrecy_rate(d, ch, p);
        double min_sinr = 1e300;
        for (double r : rep.user_rates) {
            min_sinr = std::min(min_sinr, std::exp2(r) - 1.0);
        }
        CHECK(min_sinr >= sol.theta - 1e-6 * std::max(1.0, sol.theta));
    }
}

TEST_CASE("tight slack leaves the recovered split unchanged") {
    inner::InnerSolution sol;
    sol.status = SolveStatus::kOptimal;
    sol.t = 0.5;
    sol.xi = 2.0;
    sol.sigma2_sp = 1e-7;
    sol.q_cov_t = MatrixXcd::Identity(2, 2);
    sol.an_cov_t = MatrixXcd::Zero(2, 2);
    sol.rho_t.resize(1);
    sol.rho_t << 0.8;
    sol.slack.resize(1);
    sol.slack << sol.xi * sol.xi * sol.sigma2_sp / sol.rho_t(0);
    sol.theta = 1.0;

    const metrics::TransmitDesign d = inner::recover_design(sol);
    CHECK(d.rho[0] == doctest::Approx(sol.rho_t(0) / sol.xi).epsilon(1e-12));

    // A loose slack tightens the split downward, never upward.
    inner::InnerSolution loose = sol;
    loose.slack(0) *= 4.0;
    const metrics::TransmitDesign d2 = inner::recover_design(loose);
    CHECK(d2.rho[0] < d.rho[0]);
    CHECK(d2.rho[0] == doctest::Approx(d.rho[0] / 4.0).epsilon(1e-12));

    inner::InnerSolution bad = sol;
    bad.status = SolveStatus::kInfeasible;
    CHECK_THROWS(inner::recover_design(bad));
}

TEST_CASE("common phase rotation of all channels is invisible") {
    const model::SystemParams p = tiny_params();
    const model::ChannelSet ch = model::generate_channels(p, mix_seed(6, 0));
    const inner::InnerSolution base = inner::solve_inner(p, ch, 0.5);
    REQUIRE(base.status == SolveStatus::kOptimal);

    model::ChannelSet rotated = ch;
    const std::complex<double> phase = std::polar(1.0, 1.234567);
    for (auto& h : rotated.h_users) h *= phase;
    for (auto& hm : rotated.h_eves) hm *= phase;
    const inner::InnerSolution rot = inner::solve_inner(p, rotated, 0.5);
    REQUIRE(rot.status == SolveStatus::kOptimal);
    CHECK(std::abs(rot.theta - base.theta) <=
          1e-6 * std::max(1.0, std::abs(base.theta)));
}

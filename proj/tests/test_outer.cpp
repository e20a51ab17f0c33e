#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "secbeam/harness.hpp"
#include "secbeam/model.hpp"
#include "secbeam/outer.hpp"
#include "secbeam/random.hpp"

using namespace secbeam;
using conic::SolveStatus;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

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

}  // namespace

TEST_CASE("t lower bound formula and limits") {
    model::SystemParams p = tiny_params();
    p.e_bar_s = p.e_bar_e = 0.0;

    model::ChannelSet ch;
    VectorXcd h(2);
    h << std::sqrt(1e-3), 0.0;
    ch.h_users = {h};
    ch.h_eves = {MatrixXcd::Zero(2, 1)};

    p.p_total = 1.0;
    p.sigma2_sa = 1e-7;
    CHECK(outer::t_lower_bound(p, ch) ==
          doctest::Approx(1.0 / (1.0 + 1e4)).epsilon(1e-12));

    p.p_total = 1e-12;  // vanishing power pushes the bound to one
    CHECK(outer::t_lower_bound(p, ch) == doctest::Approx(1.0).epsilon(1e-6));

    // A stronger extra user strictly lowers the bound.
    p.p_total = 1.0;
    p.n_users = 2;
    model::ChannelSet two = ch;
    VectorXcd h2(2);
    h2 << std::sqrt(4e-3), 0.0;
    two.h_users.push_back(h2);
    CHECK(outer::t_lower_bound(p, two) < outer::t_lower_bound(p, ch));
}

TEST_CASE("search result dominates its own trace") {
    const model::SystemParams p = tiny_params();
    const model::ChannelSet ch = model::generate_channels(p, mix_seed(1, 0));
    const outer::OuterResult res = outer::maximize_over_t(p, ch, {16, 8});
    REQUIRE(res.status == SolveStatus::kOptimal);

    CHECK(res.t_star >= res.t_min - 1e-12);
    CHECK(res.t_star <= 1.0 + 1e-12);
    for (const outer::TracePoint& pt : res.trace) {
        if (pt.status != SolveStatus::kOptimal) continue;
        CHECK(res.r_upper >= pt.rate - 1e-12);
        // Per-point definition recomputed independently.
        const double rate = std::log2(1.0 + pt.f_tilde) + std::log2(pt.t);
        CHECK(std::abs(rate - pt.rate) < 1e-9);
        CHECK(pt.t >= res.t_min - 1e-12);
        CHECK(pt.t <= 1.0 + 1e-12);
    }
}

TEST_CASE("doubling the refinement grid never lowers the result") {
    const model::SystemParams p = tiny_params();
    const model::ChannelSet ch = model::generate_channels(p, mix_seed(2, 0));
    const outer::OuterResult a = outer::maximize_over_t(p, ch, {16, 8});
    const outer::OuterResult b = outer::maximize_over_t(p, ch, {16, 16});
    REQUIRE(a.status == SolveStatus::kOptimal);
    REQUIRE(b.status == SolveStatus::kOptimal);
    CHECK(b.r_upper >= a.r_upper - 1e-9);
}

TEST_CASE("grid bounds are validated") {
    const model::SystemParams p = tiny_params();
    const model::ChannelSet ch = model::generate_channels(p, 3);
    CHECK_THROWS(outer::maximize_over_t(p, ch, {4, 8}));
    CHECK_THROWS(outer::maximize_over_t(p, ch, {16, 0}));
}

TEST_CASE("search value matches the exhaustive reference") {
    const model::SystemParams p = tiny_params();
    const model::ChannelSet ch = model::generate_channels(p, mix_seed(1, 0));
    const outer::OuterResult res = outer::maximize_over_t(p, ch, {16, 8});
    REQUIRE(res.status == SolveStatus::kOptimal);
    const harness::OracleResult oracle = harness::brute_force_oracle(p, ch);
    REQUIRE(oracle.feasible);
    CHECK(std::abs(res.r_upper - oracle.rate_bits) < 0.05);
}

TEST_CASE("unreachable energy floors report problem infeasibility") {
    model::SystemParams p = tiny_params();
    p.e_bar_s = 1.0;  // far above anything harvestable at 10 mW
    const model::ChannelSet ch = model::generate_channels(p, 4);
    const outer::OuterResult res = outer::maximize_over_t(p, ch, {8, 1});
    CHECK(res.status == SolveStatus::kInfeasible);
    CHECK(res.r_upper == 0.0);
}

TEST_CASE("rate grows with the power budget when harvesting is off") {
    model::SystemParams p = tiny_params();
    p.e_bar_s = p.e_bar_e = 0.0;
    const model::ChannelSet ch = model::generate_channels(p, mix_seed(3, 0));
    double prev = -1.0;
    for (double dbm : {0.0, 10.0, 20.0}) {
        p.p_total = model::dbm_to_watts(dbm);
        const outer::OuterResult res = outer::maximize_over_t(p, ch, {12, 4});
        REQUIRE(res.status == SolveStatus::kOptimal);
        CHECK(res.r_upper >= prev - 1e-9);
        prev = res.r_upper;
    }
}

TEST_CASE("extra point folding respects the running maximum") {
    const model::SystemParams p = tiny_params();
    const model::ChannelSet ch = model::generate_channels(p, mix_seed(4, 0));
    outer::OuterResult res = outer::maximize_over_t(p, ch, {12, 4});
    REQUIRE(res.status == SolveStatus::kOptimal);

    const double held = res.r_upper;
    // A plain re-evaluation near the best point cannot lower the maximum.
    outer::refine_with_point(res, p, ch, res.t_star * 0.997);
    CHECK(res.r_upper >= held - 1e-12);

    // Out-of-range t values are ignored outright.
    outer::refine_with_point(res, p, ch, 0.0);
    outer::refine_with_point(res, p, ch, -1.0);
    CHECK(res.r_upper >= held - 1e-12);
}

TEST_CASE("witness values lift the trace and the maximum") {
    const model::SystemParams p = tiny_params();
    const model::ChannelSet ch = model::generate_channels(p, mix_seed(5, 0));
    outer::OuterResult res = outer::maximize_over_t(p, ch, {12, 4});
    REQUIRE(res.status == SolveStatus::kOptimal);

    // A certified value above the solved one must raise the bound, even at
    // an already-traced t where the solve is skipped as a duplicate.
    const double t = res.t_star;
    const double boosted = 2.0 * (std::exp2(res.r_upper - std::log2(t)) - 1.0);
    const double wrate = std::log2(1.0 + boosted) + std::log2(t);
    outer::refine_with_point(res, p, ch, t, boosted);
    CHECK(res.r_upper == doctest::Approx(wrate).epsilon(1e-12));
    CHECK(res.t_star == t);

    // A weaker witness changes nothing.
    const double held = res.r_upper;
    outer::refine_with_point(res, p, ch, t, 0.5 * boosted);
    CHECK(res.r_upper == held);

    bool lifted_point_consistent = false;
    for (const outer::TracePoint& pt : res.trace) {
        if (pt.t == t && pt.status == SolveStatus::kOptimal &&
            std::abs(pt.rate - wrate) < 1e-12) {
            lifted_point_consistent =
                std::abs(std::log2(1.0 + pt.f_tilde) + std::log2(pt.t) - pt.rate) <
                1e-9;
        }
    }
    CHECK(lifted_point_consistent);
}

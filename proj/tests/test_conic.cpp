#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "secbeam/conic.hpp"
#include "secbeam/random.hpp"

using namespace secbeam;
using conic::ConicProgram;
using conic::LinExpr;
using conic::SolveStatus;
using Eigen::VectorXcd;

TEST_CASE("rotated cone attains the am-gm equality point") {
    ConicProgram prog;
    const int u = prog.add_scalar("u");
    const int v = prog.add_scalar("v");
    prog.add_rotated_soc(LinExpr::variable(u), LinExpr::variable(v),
                         {LinExpr(2.0)});
    prog.set_minimize(LinExpr::variable(u) + LinExpr::variable(v));
    const conic::SolverOutcome out = prog.solve();
    REQUIRE(out.status == SolveStatus::kOptimal);
    CHECK(std::abs(out.objective - 4.0) < 1e-6);
    CHECK(std::abs(out.x(u) - 2.0) < 1e-4);
    CHECK(std::abs(out.x(v) - 2.0) < 1e-4);
}

TEST_CASE("rotated cone with zero wing reduces to nonnegativity") {
    ConicProgram prog;
    const int u = prog.add_scalar("u");
    const int v = prog.add_scalar("v");
    prog.add_rotated_soc(LinExpr::variable(u), LinExpr::variable(v),
                         {LinExpr(0.0)});
    prog.set_minimize(LinExpr::variable(u) + LinExpr::variable(v));
    const conic::SolverOutcome out = prog.solve();
    REQUIRE(out.status == SolveStatus::kOptimal);
    CHECK(std::abs(out.objective) < 1e-6);
    CHECK(out.x(u) > -1e-7);
    CHECK(out.x(v) > -1e-7);
}

TEST_CASE("rotated cone with pinned side gives the quotient bound") {
    ConicProgram prog;
    const int u = prog.add_scalar("u");
    const int v = prog.add_scalar("v");
    prog.add_eq(LinExpr::variable(u), 1.0);
    prog.add_rotated_soc(LinExpr::variable(u), LinExpr::variable(v),
                         {LinExpr(3.0)});
    prog.set_minimize(LinExpr::variable(v));
    const conic::SolverOutcome out = prog.solve();
    REQUIRE(out.status == SolveStatus::kOptimal);
    CHECK(std::abs(out.objective - 9.0) < 1e-6);
}

TEST_CASE("trace minimization over the psd cone hits the corner") {
    ConicProgram prog;
    const int x11 = prog.add_scalar("x11");
    const int x12 = prog.add_scalar("x12");
    const int x22 = prog.add_scalar("x22");
    prog.add_psd_block({{LinExpr::variable(x11), LinExpr::variable(x12)},
                        {LinExpr::variable(x12), LinExpr::variable(x22)}});
    prog.add_ge(LinExpr::variable(x11), 1.0);
    prog.set_minimize(LinExpr::variable(x11) + LinExpr::variable(x22));
    const conic::SolverOutcome out = prog.solve();
    REQUIRE(out.status == SolveStatus::kOptimal);
    CHECK(std::abs(out.objective - 1.0) < 1e-6);
    CHECK(std::abs(out.x(x22)) < 1e-5);
}

TEST_CASE("constant negative definite block is infeasible") {
    ConicProgram prog;
    const int x = prog.add_scalar("x");
    prog.add_ge(LinExpr::variable(x), 0.0);
    prog.add_psd_block({{LinExpr(-1.0), LinExpr(0.0)},
                        {LinExpr(0.0), LinExpr(-1.0)}});
    prog.set_minimize(LinExpr::variable(x));
    CHECK(prog.solve().status == SolveStatus::kInfeasible);
}

TEST_CASE("two by two determinant condition") {
    ConicProgram prog;
    const int x = prog.add_scalar("x");
    prog.add_psd_block({{LinExpr::variable(x), LinExpr(1.0)},
                        {LinExpr(1.0), LinExpr::variable(x)}});
    prog.set_minimize(LinExpr::variable(x));
    const conic::SolverOutcome out = prog.solve();
    REQUIRE(out.status == SolveStatus::kOptimal);
    CHECK(std::abs(out.objective - 1.0) < 1e-6);
}

TEST_CASE("contradictory linear bounds are infeasible") {
    ConicProgram prog;
    const int x = prog.add_scalar("x");
    prog.add_ge(LinExpr::variable(x), 1.0);
    prog.add_le(LinExpr::variable(x), 0.0);
    prog.set_minimize(LinExpr::variable(x));
    CHECK(prog.solve().status == SolveStatus::kInfeasible);
}

TEST_CASE("bounded maximization reaches the bound") {
    ConicProgram prog;
    const int theta = prog.add_scalar("theta");
    prog.add_le(LinExpr::variable(theta), 5.0);
    prog.add_ge(LinExpr::variable(theta), 0.0);
    prog.set_maximize(LinExpr::variable(theta));
    const conic::SolverOutcome out = prog.solve();
    REQUIRE(out.status == SolveStatus::kOptimal);
    CHECK(std::abs(out.objective - 5.0) < 1e-6);
}

TEST_CASE("hermitian variable trace minimization has the pairing optimum") {
    GaussianRng rng(51);
    VectorXcd h(3);
    for (int i = 0; i < 3; ++i) h(i) = rng.cscg(1.0);

    ConicProgram prog;
    const conic::HermVar m = prog.add_hermitian_psd("M", 3);
    prog.add_ge(prog.quad_form(m, h), 1.0);
    prog.set_minimize(prog.trace(m));
    const conic::SolverOutcome out = prog.solve();
    REQUIRE(out.status == SolveStatus::kOptimal);
    CHECK(out.objective == doctest::Approx(1.0 / h.squaredNorm()).epsilon(1e-5));

    // The minimizer is the normalized rank-one pairing matrix.
    const Eigen::MatrixXcd val = prog.hermitian_value(m, out.x);
    const Eigen::MatrixXcd want =
        h * h.adjoint() / (h.squaredNorm() * h.squaredNorm());
    CHECK((val - want).norm() < 1e-4 * want.norm());
}

TEST_CASE("standard form round-trips through the text dump") {
    ConicProgram prog;
    const int u = prog.add_scalar("u");
    const int v = prog.add_scalar("v");
    prog.add_rotated_soc(LinExpr::variable(u), LinExpr::variable(v),
                         {LinExpr(2.0)});
    prog.add_ge(LinExpr::variable(u), 0.1);
    prog.set_minimize(LinExpr::variable(u) + 2.0 * LinExpr::variable(v));

    const conic::StandardForm sf = prog.standard_form();
    std::stringstream ss;
    conic::dump_standard_form(ss, sf);
    const conic::StandardForm back = conic::parse_standard_form(ss);

    const conic::RawOutcome a = conic::solve_standard_form(sf);
    const conic::RawOutcome b = conic::solve_standard_form(back);
    REQUIRE(a.status == SolveStatus::kOptimal);
    REQUIRE(b.status == SolveStatus::kOptimal);
    CHECK(std::abs(a.objective - b.objective) < 1e-8);

    CHECK((sf.c - back.c).norm() == 0.0);
    CHECK((sf.A - back.A).norm() == 0.0);
    CHECK((sf.G - back.G).norm() == 0.0);
    CHECK((sf.b - back.b).norm() == 0.0);
    CHECK((sf.h - back.h).norm() == 0.0);
}

TEST_CASE("optimal outcomes pass the independent residual recheck") {
    // solve() already demotes on recheck failure, so optimal status implies
    // the reported residuals cleared the acceptance bar.
    ConicProgram prog;
    const int u = prog.add_scalar("u");
    const int v = prog.add_scalar("v");
    prog.add_rotated_soc(LinExpr::variable(u), LinExpr::variable(v),
                         {LinExpr(2.0)});
    prog.set_minimize(LinExpr::variable(u) + LinExpr::variable(v));
    const conic::SolverOutcome out = prog.solve();
    REQUIRE(out.status == SolveStatus::kOptimal);
    CHECK(out.residuals.worst() <= 1e-6);
    CHECK(out.residuals.primal_eq <= 1e-6);
    CHECK(out.residuals.cone <= 1e-6);
}

TEST_CASE("expression arithmetic evaluates affine forms") {
    LinExpr e = 2.0 * LinExpr::variable(0) - LinExpr::variable(1) + LinExpr(3.0);
    Eigen::VectorXd x(2);
    x << 1.5, 0.5;
    CHECK(e.eval(x) == doctest::Approx(2.0 * 1.5 - 0.5 + 3.0));
    e *= -2.0;
    CHECK(e.eval(x) == doctest::Approx(-2.0 * (2.0 * 1.5 - 0.5 + 3.0)));
}

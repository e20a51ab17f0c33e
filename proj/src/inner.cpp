#include "secbeam/inner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "secbeam/hermitian.hpp"

namespace secbeam::inner {

namespace {

/// Inverse of the Hermitian block packing: diagonal first, then (re, im)
/// pairs for i < j in column-major order.
MatrixXcd unpack_hermitian(const Eigen::VectorXd& p, int n) {
    MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = p(i);
    int idx = n;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            const std::complex<double> v(p(idx), p(idx + 1));
            idx += 2;
            m(i, j) = v;
            m(j, i) = std::conj(v);
        }
    }
    return m;
}

/// Nearest positive semidefinite matrix: interior-point covariances carry
/// eigenvalue dust at the solver tolerance, and downstream factorizations
/// require exact cone membership.
MatrixXcd psd_clamp(const MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm::symmetrize(m));
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return herm::symmetrize(es.eigenvectors() * ev.asDiagonal() *
                            es.eigenvectors().adjoint());
}

/// Equivalent instance with unit transmit power and order-one channel gains.
/// Rates, splits, and feasibility are invariant under jointly scaling powers
/// and channel energies, and the conic solve is far better conditioned on
/// the normalized data.
struct ScaledInstance {
    SystemParams params;
    ChannelSet channels;
    double gamma_c = 1.0;  // channel power scale
    double gamma_p = 1.0;  // transmit power scale
};

ScaledInstance scale_instance(const SystemParams& params,
                              const ChannelSet& channels) {
    ScaledInstance sc{params, channels, 1.0, params.p_total};
    double gain = 0.0;
    for (const auto& h : channels.h_users) {
        gain = std::max(gain, h.squaredNorm() / params.n_tx);
    }
    sc.gamma_c = gain > 0.0 ? gain : 1.0;

    const double power_scale = sc.gamma_c * sc.gamma_p;
    sc.params.p_total = 1.0;
    sc.params.sigma2_sa /= power_scale;
    sc.params.sigma2_sp /= power_scale;
    sc.params.sigma2_ea /= power_scale;
    sc.params.sigma2_ep /= power_scale;
    sc.params.e_bar_s /= power_scale;
    sc.params.e_bar_e /= power_scale;

    const double amp = std::sqrt(sc.gamma_c);
    for (auto& h : sc.channels.h_users) h /= amp;
    for (auto& hm : sc.channels.h_eves) hm /= amp;
    return sc;
}

/// All constraints are homogeneous of degree one or two in the transformed
/// variables, so the normalization right-hand side is a free positive
/// constant: the optimum scales linearly with it and the bound value is
/// theta / normalization. Choosing it near the inverse peak SINR keeps every
/// variable O(1), which the interior-point method needs on high-SNR data.
ConicProgram build_inner_normalized(const SystemParams& params,
                                    const ChannelSet& channels, double t,
                                    double normalization) {
    params.validate();
    channels.validate(params);
    if (!(t > 0.0) || t > 1.0) {
        throw std::invalid_argument("build_inner: t must lie in (0, 1], got " +
                                    std::to_string(t));
    }

    const int n_rx = params.n_eve_rx;
    ConicProgram prog;
    const conic::HermVar qt = prog.add_hermitian_psd("q_cov_t", params.n_tx);
    const conic::HermVar vt = prog.add_hermitian_psd("an_cov_t", params.n_tx);
    const int rho0 = prog.add_vector("rho_t", params.n_users);
    const int s0 = prog.add_vector("slack", params.n_users);
    const int xi = prog.add_scalar("xi");
    const int theta = prog.add_scalar("theta");

    using conic::LinExpr;
    const LinExpr xi_e = LinExpr::variable(xi);
    const LinExpr theta_e = LinExpr::variable(theta);

    const double sig_sp = std::sqrt(params.sigma2_sp);
    const double eh_user = std::sqrt(params.e_bar_s / params.eta_s);
    for (int k = 0; k < params.n_users; ++k) {
        const auto& h = channels.h_users[k];
        const LinExpr rho_k = LinExpr::variable(rho0 + k);
        const LinExpr s_k = LinExpr::variable(s0 + k);
        const LinExpr sig_q = prog.quad_form(qt, h);
        const LinExpr an_q = prog.quad_form(vt, h);

        // Worst-user signal power epigraph.
        prog.add_ge(sig_q - theta_e, 0.0);

        // Denominator normalization: the slack dominates the normalized
        // processing-noise term xi^2 sigma2_sp / rho_t.
        prog.add_eq(an_q + params.sigma2_sa * xi_e + s_k, normalization);
        prog.add_rotated_soc(s_k, rho_k, {sig_sp * xi_e});

        // User energy floor: (signal + interference + antenna noise) times
        // the harvesting share is at least (e_bar_s / eta_s) xi^2.
        prog.add_rotated_soc(sig_q + an_q + params.sigma2_sa * xi_e,
                             xi_e - rho_k, {eh_user * xi_e});

        prog.add_ge(rho_k, kStrictEps * normalization);
        prog.add_ge(xi_e - rho_k, 0.0);
    }

    // Exactly zero at the zero-leakage endpoint; (c) keeps only -H^H Q H.
    const double leak = (t == 1.0) ? 0.0 : (1.0 / t - 1.0);
    const double eh_eve =
        params.e_bar_e / params.eta_e - n_rx * params.sigma2_ea;
    for (int l = 0; l < params.n_eves; ++l) {
        const auto& hm = channels.h_eves[l];
        conic::HermExpr shield = prog.expr_of(vt).congruence(hm);
        shield.add_term(xi, params.sigma2_e() * MatrixXcd::Identity(n_rx, n_rx));
        prog.add_psd_block(leak * shield - prog.expr_of(qt).congruence(hm));

        prog.add_ge(prog.congruence_trace(qt, hm) + prog.congruence_trace(vt, hm)
                        - eh_eve * xi_e,
                    0.0);
    }

    prog.add_le(prog.trace(qt) + prog.trace(vt) - params.p_total * xi_e, 0.0);
    prog.add_ge(xi_e, kStrictEps * normalization);
    prog.add_ge(theta_e, 0.0);
    prog.set_maximize(theta_e);
    return prog;
}

}  // namespace

ConicProgram build_inner(const SystemParams& params, const ChannelSet& channels,
                         double t) {
    return build_inner_normalized(params, channels, t, 1.0);
}

namespace {

/// Guards against the spurious xi-collapse of the relaxation: when a raw
/// constraint (typically an energy floor) is unreachable, xi can shrink to
/// its lower clamp where every xi-proportional constraint degenerates to
/// 0 >= 0 below solver resolution, and the solve reports a vanishing
/// "optimal" point that maps to an infeasible design. Rechecking the
/// recovered design in raw units separates that from genuine optima.
bool recovered_design_feasible(const SystemParams& params,
                               const ChannelSet& channels, double t,
                               const InnerSolution& sol) {
    constexpr double tol = 1e-6;
    const TransmitDesign design = recover_design(sol);

    for (int k = 0; k < params.n_users; ++k) {
        const double energy =
            metrics::user_energy(channels.h_users[k], design, k, params);
        if (energy < params.e_bar_s -
                         tol * std::max(params.e_bar_s, params.sigma2_sa)) {
            return false;
        }
    }
    for (int l = 0; l < params.n_eves; ++l) {
        const double energy = metrics::eve_energy(channels.h_eves[l],
                                                  design.q_cov, design.an_cov,
                                                  params);
        if (energy < params.e_bar_e -
                         tol * std::max(params.e_bar_e, params.sigma2_ea)) {
            return false;
        }
    }

    const double power =
        design.q_cov.trace().real() + design.an_cov.trace().real();
    if (power > params.p_total * (1.0 + tol)) return false;

    const double leak = (t == 1.0) ? 0.0 : (1.0 / t - 1.0);
    for (int l = 0; l < params.n_eves; ++l) {
        const auto& hm = channels.h_eves[l];
        const MatrixXcd shield =
            leak * (hm.adjoint() * design.an_cov * hm +
                    params.sigma2_e() *
                        MatrixXcd::Identity(params.n_eve_rx, params.n_eve_rx));
        const MatrixXcd exposed = hm.adjoint() * design.q_cov * hm;
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
            herm::symmetrize(shield - exposed));
        // The congruence magnitude enters the scale so the near-equality
        // limit (leak -> 0, where shield and exposed both vanish) is judged
        // against the size of the data, not of its own violation.
        const double scale = shield.norm() + exposed.norm() +
                             hm.squaredNorm() * power;
        if (es.eigenvalues().minCoeff() < -tol * std::max(1e-12, scale)) {
            return false;
        }
    }
    return true;
}

}  // namespace

InnerSolution solve_inner(const SystemParams& params, const ChannelSet& channels,
                          double t, const conic::SolveOptions& options) {
    InnerSolution sol;
    sol.t = t;
    sol.sigma2_sp = params.sigma2_sp;

    // Solve on normalized data, then map the transformed variables back to
    // the raw units: the correspondence is exact and preserves the value.
    const ScaledInstance sc = scale_instance(params, channels);
    double snr_peak = 0.0;
    for (const auto& h : sc.channels.h_users) {
        snr_peak = std::max(snr_peak,
                            sc.params.p_total * h.squaredNorm() /
                                sc.params.sigma2_sa);
    }
    const double normalization = 1.0 / (1.0 + snr_peak);
    const ConicProgram prog =
        build_inner_normalized(sc.params, sc.channels, t, normalization);
    const conic::SolverOutcome out = prog.solve(options);
    sol.status = out.status;
    sol.residuals = out.residuals;
    sol.iterations = out.iterations;
    if (out.status != SolveStatus::kOptimal) return sol;

    const double power_scale = sc.gamma_c * sc.gamma_p;
    sol.q_cov_t =
        unpack_hermitian(out.variable_values.at("q_cov_t"), params.n_tx) /
        (normalization * sc.gamma_c);
    sol.an_cov_t =
        unpack_hermitian(out.variable_values.at("an_cov_t"), params.n_tx) /
        (normalization * sc.gamma_c);
    sol.rho_t = out.variable_values.at("rho_t") / (normalization * power_scale);
    sol.slack = out.variable_values.at("slack") / normalization;
    sol.xi = out.variable_values.at("xi")(0) / (normalization * power_scale);
    sol.theta = out.variable_values.at("theta")(0) / normalization;
    if (!recovered_design_feasible(params, channels, t, sol)) {
        sol.status = SolveStatus::kInfeasible;
    }
    return sol;
}

TransmitDesign recover_design(const InnerSolution& sol) {
    if (sol.status != SolveStatus::kOptimal) {
        throw std::logic_error("recover_design: requires an optimal solution");
    }
    const double xi = std::max(sol.xi, kStrictEps);

    TransmitDesign design;
    design.q_cov = psd_clamp(sol.q_cov_t / xi);
    design.an_cov = psd_clamp(sol.an_cov_t / xi);
    design.rho.resize(sol.rho_t.size());
    for (int k = 0; k < sol.rho_t.size(); ++k) {
        double rho_norm = sol.rho_t(k);
        if (sol.slack(k) > 0.0) {
            rho_norm = std::min(rho_norm, xi * xi * sol.sigma2_sp / sol.slack(k));
        }
        design.rho[k] =
            std::clamp(rho_norm / xi, metrics::kRhoEps, 1.0);
    }
    return design;
}

}  // namespace secbeam::inner

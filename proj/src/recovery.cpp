#include "secbeam/recovery.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

#include "secbeam/random.hpp"

namespace secbeam::recovery {

std::string to_string(Method method) {
    return method == Method::kDirectEigenvector ? "direct-eigenvector"
                                                : "gaussian-randomization";
}

RecoveryReport check_proposition1(const MatrixXcd& q_cov, const MatrixXcd& an_cov,
                                  int n_users, int n_eves, double rel_tol) {
    RecoveryReport rep;
    rep.rank_q = herm::numerical_rank(q_cov, rel_tol);
    rep.rank_v = herm::numerical_rank(an_cov, rel_tol);
    rep.prop1_holds =
        rep.rank_q <= n_users &&
        rep.rank_q * rep.rank_q + rep.rank_v * rep.rank_v <= 2 * n_users + n_eves;
    return rep;
}

VectorXcd extract_rank_one(const MatrixXcd& q_cov, double rel_tol) {
    if (herm::numerical_rank(q_cov, rel_tol) != 1) {
        throw std::invalid_argument(
            "extract_rank_one: input is not numerically rank-one");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm::symmetrize(q_cov));
    const int top = static_cast<int>(q_cov.rows()) - 1;  // ascending order
    const double lead = std::max(0.0, es.eigenvalues()(top));
    return std::sqrt(lead) * es.eigenvectors().col(top);
}

std::pair<TransmitDesign, RecoveryReport> gaussian_randomization(
    const MatrixXcd& q_cov, const MatrixXcd& an_cov,
    const std::vector<double>& rho_init, const SystemParams& params,
    const ChannelSet& channels, int n_rand, std::uint64_t seed,
    EveNoiseTerm noise_term) {
    if (n_rand < 1) {
        throw std::invalid_argument("gaussian_randomization: n_rand must be >= 1");
    }
    if (static_cast<int>(rho_init.size()) != params.n_users) {
        throw std::invalid_argument(
            "gaussian_randomization: rho_init size must match n_users");
    }

    RecoveryReport rep = check_proposition1(q_cov, an_cov, params.n_users,
                                            params.n_eves);
    rep.method = Method::kGaussianRandomization;

    // Covariance-level fallback: the returned rate never regresses below it.
    TransmitDesign best_design;
    best_design.q_cov = herm::symmetrize(q_cov);
    best_design.an_cov = herm::symmetrize(an_cov);
    best_design.rho = rho_init;
    rep.best_rate = metrics::achievable_secrecy_rate(best_design, channels,
                                                     params, noise_term)
                        .secrecy_rate;

    const double power_q = q_cov.real().trace();
    const double power_total = power_q + an_cov.real().trace();
    const bool power_ok = power_total <= params.p_total + metrics::kDesignTol;

    const MatrixXcd root = herm::psd_sqrt(best_design.q_cov);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(best_design.q_cov);
    const VectorXcd principal =
        es.eigenvectors().col(static_cast<int>(q_cov.rows()) - 1);

    GaussianRng rng(seed);
    const int n = static_cast<int>(q_cov.rows());
    for (int i = 0; i <= n_rand; ++i) {
        VectorXcd q;
        if (i == 0) {
            q = principal;  // deterministic principal direction, always first
        } else {
            VectorXcd z(n);
            for (int j = 0; j < n; ++j) z(j) = rng.cscg(1.0);
            q = root * z;
        }
        ++rep.n_candidates_tried;
        const double nq = q.squaredNorm();
        if (!(nq > 0.0)) continue;
        q *= std::sqrt(power_q / nq);  // keeps ||q||^2 = tr(q_cov)

        // Largest split meeting the user energy floor; the rate rises in rho.
        std::vector<double> rho(params.n_users, 1.0);
        bool feasible = power_ok;
        for (int k = 0; feasible && k < params.n_users; ++k) {
            const auto& h = channels.h_users[k];
            const double received = std::norm(h.dot(q)) +
                                    herm::quadratic_form(h, an_cov) +
                                    params.sigma2_sa;
            if (params.e_bar_s > 0.0) {
                const double r = 1.0 - params.e_bar_s / (params.eta_s * received);
                if (r < metrics::kRhoEps) {
                    feasible = false;
                    break;
                }
                rho[k] = std::min(1.0, r);
            }
        }
        if (!feasible) continue;

        TransmitDesign cand;
        cand.q_cov = q * q.adjoint();
        cand.an_cov = best_design.an_cov;
        cand.rho = std::move(rho);
        cand.beamformer = q;

        for (int l = 0; feasible && l < params.n_eves; ++l) {
            feasible = metrics::eve_energy(channels.h_eves[l], cand.q_cov,
                                           cand.an_cov, params) >=
                       params.e_bar_e - 1e-9;
        }
        if (!feasible) continue;

        ++rep.n_feasible;
        const double rate = metrics::achievable_secrecy_rate(cand, channels,
                                                             params, noise_term)
                                .secrecy_rate;
        if (rate > rep.best_rate) {
            rep.best_rate = rate;
            best_design = std::move(cand);
        }
    }
    return {std::move(best_design), rep};
}

}  // namespace secbeam::recovery

#include "secbeam/metrics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "secbeam/hermitian.hpp"

namespace secbeam::metrics {

namespace {

// log2 det(A + B) - log2 det(A) for Hermitian A (positive definite) and
// PSD B, avoiding an explicit inverse. Returns +inf when A is singular on a
// subspace that B excites (possible only with EveNoiseTerm::kOmit).
double log2_det_ratio(const MatrixXcd& a, const MatrixXcd& b) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> ea(herm::symmetrize(a), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eab(herm::symmetrize(a + b), Eigen::EigenvaluesOnly);
    const double floor = 1e-18 * std::max(1.0, eab.eigenvalues().maxCoeff());
    double out = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double la = ea.eigenvalues()(i);
        const double lab = eab.eigenvalues()(i);
        if (la <= floor) {
            if (lab <= floor) continue;  // common null space contributes 0
            return std::numeric_limits<double>::infinity();
        }
        out += std::log2(lab) - std::log2(la);
    }
    return std::max(0.0, out);
}

}  // namespace

void TransmitDesign::validate(const SystemParams& params) const {
    params.validate();
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("TransmitDesign: ") + what);
    };
    require(q_cov.rows() == params.n_tx && q_cov.cols() == params.n_tx,
            "q_cov dimension mismatch");
    require(an_cov.rows() == params.n_tx && an_cov.cols() == params.n_tx,
            "an_cov dimension mismatch");
    require(static_cast<int>(rho.size()) == params.n_users, "rho size mismatch");
    for (double r : rho) {
        require(r > 0.0 && r <= 1.0 + kDesignTol, "rho out of (0,1]");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eq(herm::symmetrize(q_cov), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> ev(herm::symmetrize(an_cov), Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, std::max(q_cov.norm(), an_cov.norm()));
    require(eq.eigenvalues().minCoeff() >= -kDesignTol * scale, "q_cov not PSD");
    require(ev.eigenvalues().minCoeff() >= -kDesignTol * scale, "an_cov not PSD");
    const double power = q_cov.real().trace() + an_cov.real().trace();
    require(power <= params.p_total + kDesignTol * std::max(1.0, params.p_total),
            "power budget exceeded");
    if (beamformer.has_value()) {
        const double tr = std::max(q_cov.real().trace(), 1e-300);
        const MatrixXcd outer = (*beamformer) * beamformer->adjoint();
        require((outer - q_cov).norm() / tr < kDesignTol,
                "beamformer inconsistent with q_cov");
    }
}

double user_rate(const VectorXcd& h, const TransmitDesign& design, int k,
                 const SystemParams& params) {
    const double rho = design.rho.at(static_cast<std::size_t>(k));
    if (rho <= 0.0) {
        throw std::invalid_argument("user_rate: rho must be positive");
    }
    const double num = std::max(0.0, herm::quadratic_form(h, design.q_cov));
    const double den = std::max(0.0, herm::quadratic_form(h, design.an_cov)) +
                       params.sigma2_sa + params.sigma2_sp / rho;
    return std::log2(1.0 + num / den);
}

double eve_rate_upper(const MatrixXcd& h_eve, const MatrixXcd& q_cov,
                      const MatrixXcd& an_cov, const SystemParams& params,
                      EveNoiseTerm noise_term) {
    const MatrixXcd hq = h_eve.adjoint() * q_cov * h_eve;
    MatrixXcd hv = h_eve.adjoint() * an_cov * h_eve;
    if (noise_term == EveNoiseTerm::kInclude) {
        hv += params.sigma2_e() * MatrixXcd::Identity(hv.rows(), hv.cols());
    }
    return log2_det_ratio(hv, hq);
}

double eve_rate_exact(const MatrixXcd& h_eve, const MatrixXcd& q_cov,
                      const MatrixXcd& an_cov, double rho_e,
                      const SystemParams& params) {
    if (rho_e <= 0.0 || rho_e > 1.0) {
        throw std::invalid_argument("eve_rate_exact: rho_e must be in (0,1]");
    }
    const Eigen::Index ne = h_eve.cols();
    const MatrixXcd eye = MatrixXcd::Identity(ne, ne);
    const MatrixXcd a =
        rho_e * (params.sigma2_ea * eye + h_eve.adjoint() * an_cov * h_eve) +
        params.sigma2_ep * eye;
    const MatrixXcd b = rho_e * (h_eve.adjoint() * q_cov * h_eve);
    return log2_det_ratio(a, b);
}

double user_energy(const VectorXcd& h, const TransmitDesign& design, int k,
                   const SystemParams& params) {
    const double rho = design.rho.at(static_cast<std::size_t>(k));
    const double received = std::max(0.0, herm::quadratic_form(h, design.q_cov)) +
                            std::max(0.0, herm::quadratic_form(h, design.an_cov)) +
                            params.sigma2_sa;
    return params.eta_s * (1.0 - rho) * received;
}

double eve_energy(const MatrixXcd& h_eve, const MatrixXcd& q_cov,
                  const MatrixXcd& an_cov, const SystemParams& params) {
    const double tq = (h_eve.adjoint() * q_cov * h_eve).real().trace();
    const double tv = (h_eve.adjoint() * an_cov * h_eve).real().trace();
    return params.eta_e * (std::max(0.0, tq) + std::max(0.0, tv) +
                           params.n_eve_rx * params.sigma2_ea);
}

DesignReport achievable_secrecy_rate(const TransmitDesign& design,
                                     const ChannelSet& channels,
                                     const SystemParams& params,
                                     EveNoiseTerm noise_term) {
    channels.validate(params);
    DesignReport report;
    report.user_rates.reserve(channels.h_users.size());
    report.user_energies.reserve(channels.h_users.size());
    for (std::size_t k = 0; k < channels.h_users.size(); ++k) {
        report.user_rates.push_back(
            user_rate(channels.h_users[k], design, static_cast<int>(k), params));
        report.user_energies.push_back(
            user_energy(channels.h_users[k], design, static_cast<int>(k), params));
    }
    report.eve_rates_upper.reserve(channels.h_eves.size());
    report.eve_energies.reserve(channels.h_eves.size());
    for (const auto& g : channels.h_eves) {
        report.eve_rates_upper.push_back(
            eve_rate_upper(g, design.q_cov, design.an_cov, params, noise_term));
        report.eve_energies.push_back(eve_energy(g, design.q_cov, design.an_cov, params));
    }
    double min_user = std::numeric_limits<double>::infinity();
    for (double r : report.user_rates) min_user = std::min(min_user, r);
    double max_eve = 0.0;
    for (double r : report.eve_rates_upper) max_eve = std::max(max_eve, r);
    report.secrecy_rate = std::max(0.0, min_user - max_eve);
    return report;
}

}  // namespace secbeam::metrics

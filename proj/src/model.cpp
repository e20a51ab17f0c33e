#include "secbeam/model.hpp"

#include <cmath>

#include "secbeam/random.hpp"

namespace secbeam::model {

double dbm_to_watts(double p_dbm) {
    return std::pow(10.0, (p_dbm - 30.0) / 10.0);
}

double watts_to_dbm(double p_watts) {
    if (p_watts <= 0.0) {
        throw std::invalid_argument("watts_to_dbm: power must be positive");
    }
    return 10.0 * std::log10(p_watts) + 30.0;
}

void SystemParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("SystemParams: ") + what);
    };
    require(n_tx >= 1, "n_tx must be positive");
    require(n_users >= 1, "n_users must be positive");
    require(n_eves >= 1, "n_eves must be positive");
    require(n_eve_rx >= 1, "n_eve_rx must be positive");
    require(sigma2_sa > 0 && sigma2_sp > 0 && sigma2_ea > 0 && sigma2_ep > 0,
            "noise variances must be strictly positive");
    require(eta_s > 0 && eta_s <= 1.0, "eta_s must be in (0,1]");
    require(eta_e > 0 && eta_e <= 1.0, "eta_e must be in (0,1]");
    require(p_total > 0, "p_total must be strictly positive");
    require(e_bar_s >= 0 && e_bar_e >= 0, "energy thresholds must be nonnegative");
    require(channel_variance > 0, "channel_variance must be strictly positive");
}

void ChannelSet::validate(const SystemParams& params) const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("ChannelSet: ") + what);
    };
    require(static_cast<int>(h_users.size()) == params.n_users, "wrong user count");
    require(static_cast<int>(h_eves.size()) == params.n_eves, "wrong eavesdropper count");
    for (const auto& h : h_users) {
        require(h.size() == params.n_tx, "user vector dimension mismatch");
        require(h.allFinite(), "non-finite user channel entry");
    }
    for (const auto& g : h_eves) {
        require(g.rows() == params.n_tx && g.cols() == params.n_eve_rx,
                "eavesdropper matrix dimension mismatch");
        require(g.allFinite(), "non-finite eavesdropper channel entry");
    }
}

ChannelSet generate_channels(const SystemParams& params, std::uint64_t seed) {
    params.validate();
    ChannelSet out;
    out.h_users.reserve(params.n_users);
    for (int k = 0; k < params.n_users; ++k) {
        GaussianRng rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
        VectorXcd h(params.n_tx);
        for (int i = 0; i < params.n_tx; ++i) {
            h(i) = rng.cscg(params.channel_variance);
        }
        out.h_users.push_back(std::move(h));
    }
    out.h_eves.reserve(params.n_eves);
    // Eavesdropper substreams live in a disjoint index range so channel sets
    // with different user counts share identical eavesdroppers.
    for (int l = 0; l < params.n_eves; ++l) {
        GaussianRng rng(
            mix_seed(seed, (1ULL << 32) + static_cast<std::uint64_t>(l)));
        MatrixXcd g(params.n_tx, params.n_eve_rx);
        for (int j = 0; j < params.n_eve_rx; ++j) {
            for (int i = 0; i < params.n_tx; ++i) {
                g(i, j) = rng.cscg(params.channel_variance);
            }
        }
        out.h_eves.push_back(std::move(g));
    }
    return out;
}

}  // namespace secbeam::model

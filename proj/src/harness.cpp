#include "secbeam/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "json.hpp"

#include "secbeam/inner.hpp"
#include "secbeam/random.hpp"

namespace secbeam::harness {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* where) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        if (!known) {
            throw std::invalid_argument("config: unknown key '" + item.key() +
                                        "' in " + where);
        }
    }
}

/// Accepts `<base>_dbm` or `<base>_watts` (not both); watts internally.
double read_power_pair(const json& j, const std::string& base, double fallback) {
    const std::string dbm = base + "_dbm";
    const std::string watts = base + "_watts";
    if (j.contains(dbm) && j.contains(watts)) {
        throw std::invalid_argument("config: sets both " + dbm + " and " + watts);
    }
    if (j.contains(dbm)) return model::dbm_to_watts(j.at(dbm).get<double>());
    if (j.contains(watts)) return j.at(watts).get<double>();
    return fallback;
}

template <typename T>
T read_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

double max_eve_rate(const metrics::DesignReport& report) {
    double worst = 0.0;
    for (double r : report.eve_rates_upper) worst = std::max(worst, r);
    return worst;
}

/// Smallest per-user SINR implied by a report; the value the design
/// certifies as attainable for the inner problem at its own t_e.
double min_user_sinr(const metrics::DesignReport& report) {
    double lowest = std::numeric_limits<double>::infinity();
    for (double r : report.user_rates) {
        lowest = std::min(lowest, std::exp2(r) - 1.0);
    }
    return std::isfinite(lowest) ? std::max(lowest, 0.0) : 0.0;
}

}  // namespace

void ExperimentConfig::validate() const {
    params.validate();
    if (values_dbm.empty()) {
        throw std::invalid_argument("config: sweep values must be nonempty");
    }
    for (std::size_t i = 1; i < values_dbm.size(); ++i) {
        if (!(values_dbm[i] > values_dbm[i - 1])) {
            throw std::invalid_argument(
                "config: sweep values must be strictly increasing");
        }
    }
    if (n_channel_draws < 1) {
        throw std::invalid_argument("config: n_channel_draws must be >= 1");
    }
    if (n_rand < 1) throw std::invalid_argument("config: n_rand must be >= 1");
    if (grid.n_coarse < 8) {
        throw std::invalid_argument("config: grid.n_coarse must be >= 8");
    }
    if (grid.n_refine < 1) {
        throw std::invalid_argument("config: grid.n_refine must be >= 1");
    }
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    const json root = json::parse(text);
    check_keys(root,
               {"params", "sweep", "n_channel_draws", "seed", "n_rand", "grid",
                "output_path", "eq22_noise"},
               "top level");
    ExperimentConfig cfg;
    if (root.contains("params")) {
        const json& p = root.at("params");
        check_keys(p,
                   {"n_tx", "n_users", "n_eves", "n_eve_rx", "sigma2_sa",
                    "sigma2_sp", "sigma2_ea", "sigma2_ep", "eta_s", "eta_e",
                    "p_total_dbm", "p_total_watts", "e_bar_s_dbm",
                    "e_bar_s_watts", "e_bar_e_dbm", "e_bar_e_watts",
                    "channel_variance"},
                   "params");
        cfg.params.n_tx = read_or(p, "n_tx", cfg.params.n_tx);
        cfg.params.n_users = read_or(p, "n_users", cfg.params.n_users);
        cfg.params.n_eves = read_or(p, "n_eves", cfg.params.n_eves);
        cfg.params.n_eve_rx = read_or(p, "n_eve_rx", cfg.params.n_eve_rx);
        cfg.params.sigma2_sa = read_or(p, "sigma2_sa", cfg.params.sigma2_sa);
        cfg.params.sigma2_sp = read_or(p, "sigma2_sp", cfg.params.sigma2_sp);
        cfg.params.sigma2_ea = read_or(p, "sigma2_ea", cfg.params.sigma2_ea);
        cfg.params.sigma2_ep = read_or(p, "sigma2_ep", cfg.params.sigma2_ep);
        cfg.params.eta_s = read_or(p, "eta_s", cfg.params.eta_s);
        cfg.params.eta_e = read_or(p, "eta_e", cfg.params.eta_e);
        cfg.params.p_total = read_power_pair(p, "p_total", cfg.params.p_total);
        cfg.params.e_bar_s = read_power_pair(p, "e_bar_s", cfg.params.e_bar_s);
        cfg.params.e_bar_e = read_power_pair(p, "e_bar_e", cfg.params.e_bar_e);
        cfg.params.channel_variance =
            read_or(p, "channel_variance", cfg.params.channel_variance);
    }
    if (root.contains("sweep")) {
        const json& s = root.at("sweep");
        check_keys(s, {"variable", "values_dbm"}, "sweep");
        if (s.contains("variable")) {
            const std::string v = s.at("variable").get<std::string>();
            if (v == "power") {
                cfg.variable = SweepVariable::kPower;
            } else if (v == "energy") {
                cfg.variable = SweepVariable::kEnergy;
            } else {
                throw std::invalid_argument(
                    "config: sweep.variable must be 'power' or 'energy'");
            }
        }
        cfg.values_dbm = read_or(s, "values_dbm", cfg.values_dbm);
    }
    cfg.n_channel_draws = read_or(root, "n_channel_draws", cfg.n_channel_draws);
    cfg.seed = read_or(root, "seed", cfg.seed);
    cfg.n_rand = read_or(root, "n_rand", cfg.n_rand);
    if (root.contains("grid")) {
        const json& g = root.at("grid");
        check_keys(g, {"n_coarse", "n_refine"}, "grid");
        cfg.grid.n_coarse = read_or(g, "n_coarse", cfg.grid.n_coarse);
        cfg.grid.n_refine = read_or(g, "n_refine", cfg.grid.n_refine);
    }
    cfg.output_path = read_or<std::string>(root, "output_path", cfg.output_path);
    if (root.contains("eq22_noise")) {
        const std::string v = root.at("eq22_noise").get<std::string>();
        if (v == "on") {
            cfg.noise_term = EveNoiseTerm::kInclude;
        } else if (v == "off") {
            cfg.noise_term = EveNoiseTerm::kOmit;
        } else {
            throw std::invalid_argument("config: eq22_noise must be 'on' or 'off'");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_json_text(buf.str());
}

std::string ExperimentConfig::to_json_text() const {
    json p{{"n_tx", params.n_tx},
           {"n_users", params.n_users},
           {"n_eves", params.n_eves},
           {"n_eve_rx", params.n_eve_rx},
           {"sigma2_sa", params.sigma2_sa},
           {"sigma2_sp", params.sigma2_sp},
           {"sigma2_ea", params.sigma2_ea},
           {"sigma2_ep", params.sigma2_ep},
           {"eta_s", params.eta_s},
           {"eta_e", params.eta_e},
           {"p_total_watts", params.p_total},
           {"e_bar_s_watts", params.e_bar_s},
           {"e_bar_e_watts", params.e_bar_e},
           {"channel_variance", params.channel_variance}};
    json root{
        {"params", std::move(p)},
        {"sweep",
         json{{"variable",
               variable == SweepVariable::kPower ? "power" : "energy"},
              {"values_dbm", values_dbm}}},
        {"n_channel_draws", n_channel_draws},
        {"seed", seed},
        {"n_rand", n_rand},
        {"grid", json{{"n_coarse", grid.n_coarse}, {"n_refine", grid.n_refine}}},
        {"output_path", output_path},
        {"eq22_noise", noise_term == EveNoiseTerm::kInclude ? "on" : "off"}};
    return root.dump(2);
}

InstanceResult solve_instance(const SystemParams& params,
                              const ChannelSet& channels,
                              const outer::GridSpec& grid, int n_rand,
                              std::uint64_t seed, EveNoiseTerm noise_term,
                              const conic::SolveOptions& options) {
    InstanceResult res;
    res.outer = outer::maximize_over_t(params, channels, grid, options);
    res.status = res.outer.status;
    if (res.outer.status != conic::SolveStatus::kOptimal) return res;

    // Re-derive the designs whenever re-anchoring moves the best t.
    for (int round = 0; round < 4; ++round) {
        res.design_sdr = inner::recover_design(res.outer.inner);
        res.recovery = recovery::check_proposition1(
            res.design_sdr.q_cov, res.design_sdr.an_cov, params.n_users,
            params.n_eves);
        if (res.recovery.rank_q == 1) {
            res.recovery.method = recovery::Method::kDirectEigenvector;
            res.design_gr = res.design_sdr;
            res.design_gr.beamformer =
                recovery::extract_rank_one(res.design_sdr.q_cov);
        } else {
            auto recovered = recovery::gaussian_randomization(
                res.design_sdr.q_cov, res.design_sdr.an_cov, res.design_sdr.rho,
                params, channels, n_rand, mix_seed(seed, 0x4752u), noise_term);
            res.design_gr = std::move(recovered.first);
            res.recovery = recovered.second;
        }

        const metrics::DesignReport report_sdr = metrics::achievable_secrecy_rate(
            res.design_sdr, channels, params, noise_term);
        res.report_gr = metrics::achievable_secrecy_rate(res.design_gr, channels,
                                                         params, noise_term);
        res.rate_sdr = report_sdr.secrecy_rate;
        res.rate_sdr_gr = res.report_gr.secrecy_rate;
        res.recovery.best_rate = res.rate_sdr_gr;

        // Each design stays feasible at its own eavesdropper level
        // t_e = 2^-rate_e and attains its own minimum SINR there, so folding
        // that point with the SINR as witness keeps r_upper above the
        // design's secrecy rate.
        const double t_held = res.outer.t_star;
        outer::refine_with_point(res.outer, params, channels,
                                 std::exp2(-max_eve_rate(report_sdr)),
                                 min_user_sinr(report_sdr), options);
        outer::refine_with_point(res.outer, params, channels,
                                 std::exp2(-max_eve_rate(res.report_gr)),
                                 min_user_sinr(res.report_gr), options);
        if (res.outer.t_star == t_held) break;
    }

    res.rate_upper = res.outer.r_upper;
    res.feasible = true;
    return res;
}

namespace {

std::vector<SweepRow> run_sweep(const ExperimentConfig& config,
                                SweepVariable variable) {
    config.validate();
    if (config.variable != variable) {
        throw std::invalid_argument("config: sweep variable mismatch");
    }

    std::vector<SweepRow> rows;
    rows.reserve(config.values_dbm.size());
    for (double value_dbm : config.values_dbm) {
        SystemParams params = config.params;
        const double watts = model::dbm_to_watts(value_dbm);
        if (variable == SweepVariable::kPower) {
            params.p_total = watts;
        } else {
            params.e_bar_s = watts;
            params.e_bar_e = watts;
        }

        // Work-stealing map over independent draws; the reduction below runs
        // in draw order so results do not depend on the thread count.
        const int n_draws = config.n_channel_draws;
        std::vector<InstanceResult> results(n_draws);
        std::vector<std::exception_ptr> errors(n_draws);
        std::atomic<int> next{0};
        const auto worker = [&]() {
            for (;;) {
                const int draw = next.fetch_add(1);
                if (draw >= n_draws) return;
                try {
                    const std::uint64_t draw_seed = mix_seed(config.seed, draw);
                    const ChannelSet channels =
                        model::generate_channels(params, draw_seed);
                    results[draw] =
                        solve_instance(params, channels, config.grid,
                                       config.n_rand, draw_seed,
                                       config.noise_term);
                } catch (...) {
                    errors[draw] = std::current_exception();
                }
            }
        };
        const int n_workers = std::max(
            1, std::min<int>(std::thread::hardware_concurrency(), n_draws));
        std::vector<std::thread> pool;
        pool.reserve(n_workers - 1);
        for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
        worker();
        for (std::thread& t : pool) t.join();

        SweepRow row;
        row.sweep_value = value_dbm;
        row.n_total = n_draws;
        double sum_upper = 0.0;
        double sum_sdr = 0.0;
        double sum_gr = 0.0;
        for (int draw = 0; draw < n_draws; ++draw) {
            if (errors[draw]) std::rethrow_exception(errors[draw]);
            const InstanceResult& inst = results[draw];
            if (!inst.feasible) continue;
            ++row.n_feasible;
            sum_upper += inst.rate_upper;
            sum_sdr += inst.rate_sdr;
            sum_gr += inst.rate_sdr_gr;
        }
        if (row.n_feasible > 0) {
            row.mean_rate_upper = sum_upper / row.n_feasible;
            row.mean_rate_sdr = sum_sdr / row.n_feasible;
            row.mean_rate_sdr_gr = sum_gr / row.n_feasible;
        }
        rows.push_back(row);
    }

    if (!config.output_path.empty()) {
        write_csv(config.output_path, rows, config);
    }
    return rows;
}

}  // namespace

std::vector<SweepRow> sweep_power(const ExperimentConfig& config) {
    return run_sweep(config, SweepVariable::kPower);
}

std::vector<SweepRow> sweep_energy(const ExperimentConfig& config) {
    return run_sweep(config, SweepVariable::kEnergy);
}

void write_csv(const std::string& path, const std::vector<SweepRow>& rows,
               const ExperimentConfig& config) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    os << "sweep_value,mean_rate_upper,mean_rate_sdr,mean_rate_sdr_gr,"
          "n_feasible,n_total\n";
    os << std::setprecision(12);
    for (const SweepRow& r : rows) {
        os << r.sweep_value << ',' << r.mean_rate_upper << ',' << r.mean_rate_sdr
           << ',' << r.mean_rate_sdr_gr << ',' << r.n_feasible << ','
           << r.n_total << '\n';
    }

    std::ofstream meta(path + ".meta.json");
    if (!meta) throw std::runtime_error("write_csv: cannot open " + path + ".meta.json");
    json m;
    m["library_version"] = kLibraryVersion;
    m["config"] = json::parse(config.to_json_text());
    meta << m.dump(2) << '\n';
}

namespace {

struct OracleAxis {
    double lo = 0.0;
    double hi = 0.0;
    int n = 1;

    double step() const { return n > 1 ? (hi - lo) / (n - 1) : 0.0; }
    double value(int i) const { return n > 1 ? lo + step() * i : 0.5 * (lo + hi); }
};

struct OraclePoint {
    std::array<double, 6> v{};  // a_u, phi_u, f_q, a_w, phi_w, f_v
    double ratio = -1.0;
    bool feasible = false;
};

/// |c^H d|^2 for direction d = (cos a, sin a e^{i phi}) against channel c.
double direction_gain(const model::VectorXcd& c, double a, double phi) {
    const std::complex<double> d0(std::cos(a), 0.0);
    const std::complex<double> d1 = std::sin(a) * std::complex<double>(std::cos(phi), std::sin(phi));
    return std::norm(std::conj(c(0)) * d0 + std::conj(c(1)) * d1);
}

}  // namespace

OracleResult brute_force_oracle(const SystemParams& params,
                                const ChannelSet& channels, int resolution) {
    if (params.n_tx != 2 || params.n_users != 1 || params.n_eves != 1 ||
        params.n_eve_rx != 1) {
        throw std::invalid_argument(
            "brute_force_oracle: requires n_tx=2, n_users=1, n_eves=1, "
            "n_eve_rx=1");
    }
    if (resolution < 4) {
        throw std::invalid_argument("brute_force_oracle: resolution must be >= 4");
    }
    params.validate();
    channels.validate(params);

    const model::VectorXcd& h = channels.h_users[0];
    const model::VectorXcd g = channels.h_eves[0].col(0);
    const double p_total = params.p_total;
    const double sigma_e2 = params.sigma2_e();
    const double pi = std::acos(-1.0);

    const int n_a = resolution + 1;
    const int n_phi = 2 * resolution;
    const int n_f = resolution + 1;
    std::array<OracleAxis, 6> axes{
        OracleAxis{0.0, 0.5 * pi, n_a},                              // a_u
        OracleAxis{0.0, 2.0 * pi * (n_phi - 1.0) / n_phi, n_phi},    // phi_u
        OracleAxis{0.0, 1.0, n_f},                                   // f_q
        OracleAxis{0.0, 0.5 * pi, n_a},                              // a_w
        OracleAxis{0.0, 2.0 * pi * (n_phi - 1.0) / n_phi, n_phi},    // phi_w
        OracleAxis{0.0, 1.0, n_f},                                   // f_v
    };

    OraclePoint best;
    bool any_feasible = false;

    const auto sweep_box = [&](const std::array<OracleAxis, 6>& ax) {
        // Direction gain tables shared across the power loops.
        const int n_u = ax[0].n * ax[1].n;
        const int n_w = ax[3].n * ax[4].n;
        std::vector<double> gain_uh(n_u);
        std::vector<double> gain_ug(n_u);
        std::vector<double> gain_wh(n_w);
        std::vector<double> gain_wg(n_w);
        for (int ia = 0; ia < ax[0].n; ++ia) {
            for (int ip = 0; ip < ax[1].n; ++ip) {
                const int i = ia * ax[1].n + ip;
                gain_uh[i] = direction_gain(h, ax[0].value(ia), ax[1].value(ip));
                gain_ug[i] = direction_gain(g, ax[0].value(ia), ax[1].value(ip));
            }
        }
        for (int ia = 0; ia < ax[3].n; ++ia) {
            for (int ip = 0; ip < ax[4].n; ++ip) {
                const int i = ia * ax[4].n + ip;
                gain_wh[i] = direction_gain(h, ax[3].value(ia), ax[4].value(ip));
                gain_wg[i] = direction_gain(g, ax[3].value(ia), ax[4].value(ip));
            }
        }

        for (int iu = 0; iu < n_u; ++iu) {
            for (int iq = 0; iq < ax[2].n; ++iq) {
                const double p_q = ax[2].value(iq) * p_total;
                const double sig_u = p_q * gain_uh[iu];
                const double sig_e = p_q * gain_ug[iu];
                const double p_rem = p_total - p_q;
                for (int iw = 0; iw < n_w; ++iw) {
                    for (int iv = 0; iv < ax[5].n; ++iv) {
                        const double p_v = ax[5].value(iv) * p_rem;
                        const double int_u = p_v * gain_wh[iw];
                        const double int_e = p_v * gain_wg[iw];

                        double rho = 1.0;
                        if (params.e_bar_s > 0.0) {
                            const double received = sig_u + int_u + params.sigma2_sa;
                            const double r =
                                1.0 - params.e_bar_s / (params.eta_s * received);
                            if (r < metrics::kRhoEps) continue;
                            rho = std::min(1.0, r);
                        }
                        if (params.eta_e *
                                (sig_e + int_e + params.sigma2_ea) <
                            params.e_bar_e) {
                            continue;
                        }

                        any_feasible = true;
                        const double den_u =
                            int_u + params.sigma2_sa + params.sigma2_sp / rho;
                        const double ratio = (1.0 + sig_u / den_u) /
                                             (1.0 + sig_e / (int_e + sigma_e2));
                        if (ratio > best.ratio) {
                            best.ratio = ratio;
                            best.feasible = true;
                            best.v = {ax[0].value(iu / ax[1].n),
                                      ax[1].value(iu % ax[1].n),
                                      ax[2].value(iq),
                                      ax[3].value(iw / ax[4].n),
                                      ax[4].value(iw % ax[4].n),
                                      ax[5].value(iv)};
                        }
                    }
                }
            }
        }
    };

    sweep_box(axes);
    if (!any_feasible) return {};

    // Two zoom stages around the incumbent; angles are periodic so only the
    // polar and fraction axes are clamped to their natural ranges.
    for (int stage = 0; stage < 2; ++stage) {
        std::array<OracleAxis, 6> zoom{};
        for (int d = 0; d < 6; ++d) {
            const double step = axes[d].step();
            double lo = best.v[d] - step;
            double hi = best.v[d] + step;
            if (d == 0 || d == 3) {
                lo = std::max(lo, 0.0);
                hi = std::min(hi, 0.5 * pi);
            } else if (d == 2 || d == 5) {
                lo = std::max(lo, 0.0);
                hi = std::min(hi, 1.0);
            }
            zoom[d] = OracleAxis{lo, hi, axes[d].n};
        }
        axes = zoom;
        sweep_box(axes);
    }

    OracleResult out;
    out.feasible = true;
    out.rate_bits = std::max(0.0, std::log2(best.ratio));
    return out;
}

}  // namespace secbeam::harness

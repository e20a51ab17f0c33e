#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "secbeam/harness.hpp"
#include "secbeam/hermitian.hpp"
#include "secbeam/random.hpp"

namespace {

namespace harness = secbeam::harness;
namespace hermitian = secbeam::herm;
namespace metrics = secbeam::metrics;
namespace model = secbeam::model;
namespace conic = secbeam::conic;
using conic::SolveStatus;
using nlohmann::json;

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::kOptimal: return "optimal";
        case SolveStatus::kInfeasible: return "infeasible";
        case SolveStatus::kUnbounded: return "unbounded";
        case SolveStatus::kNumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

int status_exit_code(SolveStatus s) {
    if (s == SolveStatus::kOptimal) return 0;
    if (s == SolveStatus::kInfeasible) return 1;
    return 2;
}

void print_instance(std::ostream& os, const harness::InstanceResult& res) {
    os << "status: " << status_name(res.status) << '\n';
    if (!res.feasible) return;
    os << std::setprecision(6);
    os << "t_star: " << res.outer.t_star << "  (t_min " << res.outer.t_min
       << ", " << res.outer.trace.size() << " grid points)\n";
    os << "secrecy rate upper bound: " << res.rate_upper << " bits\n";
    os << "secrecy rate, relaxed covariances: " << res.rate_sdr << " bits\n";
    os << "secrecy rate, recovered design:    " << res.rate_sdr_gr << " bits\n";
    const secbeam::recovery::RecoveryReport& rec = res.recovery;
    os << "recovery: method=" << to_string(rec.method) << " rank_q=" << rec.rank_q
       << " rank_v=" << rec.rank_v << " prop1=" << (rec.prop1_holds ? "yes" : "no")
       << " candidates=" << rec.n_candidates_tried
       << " feasible=" << rec.n_feasible << '\n';
    const metrics::DesignReport& rep = res.report_gr;
    for (std::size_t k = 0; k < rep.user_rates.size(); ++k) {
        os << "user " << k << ": rate=" << rep.user_rates[k]
           << " bits  energy=" << rep.user_energies[k]
           << " W  rho=" << res.design_gr.rho[k] << '\n';
    }
    for (std::size_t l = 0; l < rep.eve_rates_upper.size(); ++l) {
        os << "eve " << l << ": rate_upper=" << rep.eve_rates_upper[l]
           << " bits  energy=" << rep.eve_energies[l] << " W\n";
    }
}

json instance_to_json(const harness::InstanceResult& res) {
    json j;
    j["status"] = status_name(res.status);
    j["feasible"] = res.feasible;
    if (!res.feasible) return j;
    j["t_star"] = res.outer.t_star;
    j["t_min"] = res.outer.t_min;
    j["rate_upper"] = res.rate_upper;
    j["rate_sdr"] = res.rate_sdr;
    j["rate_sdr_gr"] = res.rate_sdr_gr;
    j["recovery"] = json{{"method", to_string(res.recovery.method)},
                         {"rank_q", res.recovery.rank_q},
                         {"rank_v", res.recovery.rank_v},
                         {"prop1_holds", res.recovery.prop1_holds},
                         {"n_candidates_tried", res.recovery.n_candidates_tried},
                         {"n_feasible", res.recovery.n_feasible},
                         {"best_rate", res.recovery.best_rate}};
    j["user_rates"] = res.report_gr.user_rates;
    j["eve_rates_upper"] = res.report_gr.eve_rates_upper;
    j["user_energies"] = res.report_gr.user_energies;
    j["eve_energies"] = res.report_gr.eve_energies;
    j["rho"] = res.design_gr.rho;
    return j;
}

int run_solve(const harness::ExperimentConfig& cfg, const std::string& out_path) {
    const std::uint64_t seed = secbeam::mix_seed(cfg.seed, 0);
    const model::ChannelSet channels = model::generate_channels(cfg.params, seed);
    const harness::InstanceResult res = harness::solve_instance(
        cfg.params, channels, cfg.grid, cfg.n_rand, seed, cfg.noise_term);
    print_instance(std::cout, res);
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        if (!os) throw std::runtime_error("cannot open " + out_path);
        os << instance_to_json(res).dump(2) << '\n';
    }
    return status_exit_code(res.status);
}

int run_sweep_cmd(const harness::ExperimentConfig& cfg) {
    const std::vector<harness::SweepRow> rows =
        cfg.variable == harness::SweepVariable::kPower ? harness::sweep_power(cfg)
                                                       : harness::sweep_energy(cfg);
    std::cout << "sweep_value,mean_rate_upper,mean_rate_sdr,mean_rate_sdr_gr,"
                 "n_feasible,n_total\n"
              << std::setprecision(12);
    int feasible_total = 0;
    for (const harness::SweepRow& r : rows) {
        std::cout << r.sweep_value << ',' << r.mean_rate_upper << ','
                  << r.mean_rate_sdr << ',' << r.mean_rate_sdr_gr << ','
                  << r.n_feasible << ',' << r.n_total << '\n';
        feasible_total += r.n_feasible;
    }
    if (!cfg.output_path.empty()) {
        std::cerr << "wrote " << cfg.output_path << " and " << cfg.output_path
                  << ".meta.json\n";
    }
    return feasible_total > 0 ? 0 : 1;
}

int run_oracle_check(harness::ExperimentConfig cfg, bool have_config,
                     int n_instances, int resolution,
                     const std::string& out_path) {
    model::SystemParams p = cfg.params;
    p.n_tx = 2;
    p.n_users = 1;
    p.n_eves = 1;
    p.n_eve_rx = 1;
    if (!have_config) {
        p.p_total = model::dbm_to_watts(10.0);
        p.e_bar_s = model::dbm_to_watts(-10.0);
        p.e_bar_e = model::dbm_to_watts(-10.0);
    }

    json rows = json::array();
    int n_agree = 0;
    for (int i = 0; i < n_instances; ++i) {
        const std::uint64_t seed = secbeam::mix_seed(cfg.seed, i);
        const model::ChannelSet channels = model::generate_channels(p, seed);
        const harness::InstanceResult inst = harness::solve_instance(
            p, channels, cfg.grid, cfg.n_rand, seed, cfg.noise_term);
        const harness::OracleResult oracle =
            harness::brute_force_oracle(p, channels, resolution);

        bool agree = false;
        if (!inst.feasible && !oracle.feasible) {
            agree = inst.status != SolveStatus::kNumericalFailure;
        } else if (inst.feasible && oracle.feasible) {
            agree = std::abs(inst.rate_upper - oracle.rate_bits) <= 0.05 &&
                    inst.rate_sdr_gr <= oracle.rate_bits + 0.05;
        }
        n_agree += agree ? 1 : 0;
        std::cout << "instance " << i << ": pipeline="
                  << (inst.feasible ? inst.rate_upper : 0.0) << " ("
                  << status_name(inst.status) << ") oracle="
                  << (oracle.feasible ? oracle.rate_bits : 0.0) << " ("
                  << (oracle.feasible ? "feasible" : "infeasible") << ") "
                  << (agree ? "agree" : "MISMATCH") << '\n';
        rows.push_back(json{{"instance", i},
                            {"pipeline_status", status_name(inst.status)},
                            {"pipeline_rate_upper", inst.rate_upper},
                            {"pipeline_rate_sdr_gr", inst.rate_sdr_gr},
                            {"oracle_feasible", oracle.feasible},
                            {"oracle_rate", oracle.rate_bits},
                            {"agree", agree}});
    }
    std::cout << n_agree << "/" << n_instances << " instances agree\n";
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        if (!os) throw std::runtime_error("cannot open " + out_path);
        os << rows.dump(2) << '\n';
    }
    return n_agree == n_instances ? 0 : 2;
}

int run_selftest() {
    int n_pass = 0;
    int n_fail = 0;
    const auto check = [&](const char* name, bool ok) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << '\n';
        (ok ? n_pass : n_fail) += 1;
    };

    {
        conic::ConicProgram prog;
        const int th = prog.add_scalar("theta");
        prog.add_le(conic::LinExpr::variable(th), 5.0);
        prog.set_maximize(conic::LinExpr::variable(th));
        const conic::SolverOutcome out = prog.solve();
        check("linear bound attains 5",
              out.status == SolveStatus::kOptimal &&
                  std::abs(out.objective - 5.0) < 1e-6);
    }
    {
        conic::ConicProgram prog;
        const int x = prog.add_scalar("x");
        prog.add_ge(conic::LinExpr::variable(x), 1.0);
        prog.add_le(conic::LinExpr::variable(x), 0.0);
        prog.set_maximize(conic::LinExpr::variable(x));
        check("contradictory bounds infeasible",
              prog.solve().status == SolveStatus::kInfeasible);
    }
    {
        conic::ConicProgram prog;
        const int u = prog.add_scalar("u");
        const int v = prog.add_scalar("v");
        prog.add_rotated_soc(conic::LinExpr::variable(u),
                             conic::LinExpr::variable(v),
                             {conic::LinExpr(2.0)});
        conic::LinExpr sum = conic::LinExpr::variable(u);
        sum += conic::LinExpr::variable(v);
        prog.set_minimize(sum);
        const conic::SolverOutcome out = prog.solve();
        check("product floor gives sum 4",
              out.status == SolveStatus::kOptimal &&
                  std::abs(out.objective - 4.0) < 1e-6);
    }
    {
        conic::ConicProgram prog;
        const conic::HermVar x = prog.add_hermitian_psd("x", 2);
        Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(2);
        e0(0) = 1.0;
        prog.add_ge(prog.quad_form(x, e0), 1.0);
        prog.set_minimize(prog.trace(x));
        const conic::SolverOutcome out = prog.solve();
        check("pinned corner trace minimum 1",
              out.status == SolveStatus::kOptimal &&
                  std::abs(out.objective - 1.0) < 1e-6);
    }
    {
        secbeam::GaussianRng rng(7);
        Eigen::MatrixXcd a(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a(i, j) = rng.cscg(1.0);
        const Eigen::MatrixXcd h = hermitian::symmetrize(a * a.adjoint());
        const Eigen::MatrixXcd r = hermitian::psd_sqrt(h);
        check("psd square root squares back",
              (r * r - h).norm() < 1e-10 * (1.0 + h.norm()));
        Eigen::MatrixXcd rank1 = Eigen::MatrixXcd::Zero(3, 3);
        rank1(0, 0) = 4.0;
        check("rank of scaled projector is 1",
              hermitian::numerical_rank(rank1) == 1);
    }
    {
        check("30 dBm is one watt",
              std::abs(model::dbm_to_watts(30.0) - 1.0) < 1e-12);
        check("dBm round trip",
              std::abs(model::watts_to_dbm(model::dbm_to_watts(-10.0)) + 10.0) <
                  1e-9);
    }
    {
        model::SystemParams p;
        p.n_tx = 2;
        p.n_users = 1;
        p.n_eves = 1;
        p.n_eve_rx = 1;
        p.validate();
        const model::ChannelSet channels = model::generate_channels(p, 3);
        const Eigen::VectorXcd& h = channels.h_users[0];
        metrics::TransmitDesign design;
        design.q_cov = p.p_total * (h * h.adjoint()) / h.squaredNorm();
        design.an_cov = Eigen::MatrixXcd::Zero(2, 2);
        design.rho = {1.0};
        const double expect = std::log2(
            1.0 + p.p_total * h.squaredNorm() / (p.sigma2_sa + p.sigma2_sp));
        check("matched filter rate matches closed form",
              std::abs(metrics::user_rate(h, design, 0, p) - expect) < 1e-9);
        const double up = metrics::eve_rate_upper(channels.h_eves[0],
                                                  design.q_cov, design.an_cov, p);
        const double ex = metrics::eve_rate_exact(channels.h_eves[0],
                                                  design.q_cov, design.an_cov,
                                                  0.5, p);
        check("exact eavesdropper rate below bound", ex <= up + 1e-10);
    }

    std::cout << n_pass << " passed, " << n_fail << " failed\n";
    return n_fail == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"secrecy beamforming with wireless power transfer"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 1;
    int n_rand = 100;
    int grid_coarse = 32;
    int grid_refine = 16;
    std::string eq22 = "on";

    auto* opt_config = app.add_option("--config", config_path, "JSON config file");
    auto* opt_out = app.add_option("--out", out_path, "output path");
    auto* opt_seed = app.add_option("--seed", seed, "base RNG seed");
    auto* opt_nrand =
        app.add_option("--n-rand", n_rand, "randomization candidates");
    auto* opt_coarse =
        app.add_option("--grid-coarse", grid_coarse, "coarse t grid points");
    auto* opt_refine =
        app.add_option("--grid-refine", grid_refine, "refinement t grid points");
    auto* opt_noise = app.add_option("--eq22-noise", eq22,
                                     "keep the eavesdropper noise term in the "
                                     "intercept-rate bound")
                          ->check(CLI::IsMember({"on", "off"}));

    auto* cmd_solve =
        app.add_subcommand("solve", "solve one channel realization");
    auto* cmd_power = app.add_subcommand("sweep-power", "mean rates vs power");
    auto* cmd_energy =
        app.add_subcommand("sweep-energy", "mean rates vs harvest floor");
    auto* cmd_oracle = app.add_subcommand(
        "oracle-check", "cross-validate the pipeline on tiny instances");
    auto* cmd_selftest =
        app.add_subcommand("selftest", "run the built-in invariant checks");
    int n_instances = 10;
    int resolution = 12;
    cmd_oracle->add_option("--n-instances", n_instances, "instances to compare");
    cmd_oracle->add_option("--resolution", resolution, "oracle grid resolution");
    for (CLI::App* sub :
         {cmd_solve, cmd_power, cmd_energy, cmd_oracle, cmd_selftest}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        harness::ExperimentConfig cfg;
        if (opt_config->count()) {
            cfg = harness::ExperimentConfig::from_json_file(config_path);
        }
        if (opt_seed->count()) cfg.seed = seed;
        if (opt_nrand->count()) cfg.n_rand = n_rand;
        if (opt_coarse->count()) cfg.grid.n_coarse = grid_coarse;
        if (opt_refine->count()) cfg.grid.n_refine = grid_refine;
        if (opt_noise->count()) {
            cfg.noise_term = eq22 == "on" ? metrics::EveNoiseTerm::kInclude
                                          : metrics::EveNoiseTerm::kOmit;
        }
        if (opt_out->count()) cfg.output_path = out_path;
        cfg.validate();

        if (cmd_selftest->parsed()) return run_selftest();
        if (cmd_solve->parsed()) return run_solve(cfg, out_path);
        if (cmd_oracle->parsed()) {
            return run_oracle_check(cfg, opt_config->count() > 0, n_instances,
                                    resolution, out_path);
        }
        cfg.variable = cmd_power->parsed() ? harness::SweepVariable::kPower
                                           : harness::SweepVariable::kEnergy;
        return run_sweep_cmd(cfg);
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 2;
    }
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "secbeam/outer.hpp"
#include "secbeam/recovery.hpp"

namespace secbeam::harness {

using metrics::EveNoiseTerm;
using model::ChannelSet;
using model::SystemParams;

inline constexpr const char* kLibraryVersion = "1.0.0";

enum class SweepVariable { kPower, kEnergy };

/**
 * Monte Carlo sweep description. External power and energy units are dBm
 * (watts internally). Channel draws are common random numbers: draw i uses
 * the same realization at every sweep value.
 */
struct ExperimentConfig {
    SystemParams params;
    SweepVariable variable = SweepVariable::kPower;
    std::vector<double> values_dbm{20.0, 25.0, 30.0, 35.0, 40.0};  // strictly increasing
    int n_channel_draws = 100;
    std::uint64_t seed = 1;
    int n_rand = 100;
    outer::GridSpec grid;
    std::string output_path;
    EveNoiseTerm noise_term = EveNoiseTerm::kInclude;

    void validate() const;
    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json_text() const;
};

struct SweepRow {
    double sweep_value = 0.0;  // dBm
    double mean_rate_upper = 0.0;
    double mean_rate_sdr = 0.0;
    double mean_rate_sdr_gr = 0.0;
    int n_feasible = 0;
    int n_total = 0;
};

struct InstanceResult {
    conic::SolveStatus status = conic::SolveStatus::kInfeasible;
    bool feasible = false;
    double rate_upper = 0.0;
    double rate_sdr = 0.0;
    double rate_sdr_gr = 0.0;
    outer::OuterResult outer;
    metrics::TransmitDesign design_sdr;  // valid iff feasible
    metrics::TransmitDesign design_gr;   // valid iff feasible
    metrics::DesignReport report_gr;     // valid iff feasible
    recovery::RecoveryReport recovery;   // valid iff feasible
};

/**
 * Full pipeline on one realization: outer search, covariance recovery, rank
 * check, then direct extraction (rank one) or randomization, then metrics.
 * The upper bound is re-anchored at the eavesdropper-rate-derived t of each
 * emitted design, which keeps the achievable rates below it.
 */
InstanceResult solve_instance(const SystemParams& params,
                              const ChannelSet& channels,
                              const outer::GridSpec& grid, int n_rand,
                              std::uint64_t seed,
                              EveNoiseTerm noise_term = EveNoiseTerm::kInclude,
                              const conic::SolveOptions& options = {});

/// Per-row means over the feasible instances; failures are excluded from
/// means and counted in n_total - n_feasible. Writes CSV when the config
/// names an output path.
std::vector<SweepRow> sweep_power(const ExperimentConfig& config);
std::vector<SweepRow> sweep_energy(const ExperimentConfig& config);

/// CSV with a header naming the SweepRow fields, one row per sweep value,
/// plus a `<path>.meta.json` sidecar with the full config and version.
void write_csv(const std::string& path, const std::vector<SweepRow>& rows,
               const ExperimentConfig& config);

struct OracleResult {
    bool feasible = false;
    double rate_bits = 0.0;  // best feasible grid value clamped at zero
};

/**
 * Exhaustive reference for n_tx=2, n_users=1, n_eves=1, n_eve_rx=1. At these
 * sizes a rank-one artificial-noise covariance is exhaustive (two quadratic
 * functionals and a trace admit a rank-one minimizer), so both covariances
 * are gridded over direction and power with the split picked in closed form,
 * followed by zoom stages. Halving the default step moves the result by
 * less than 0.01 bits.
 */
OracleResult brute_force_oracle(const SystemParams& params,
                                const ChannelSet& channels,
                                int resolution = 12);

}  // namespace secbeam::harness

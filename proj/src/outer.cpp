#include "secbeam/outer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace secbeam::outer {

namespace {

constexpr double kDedupRelTol = 1e-12;

/// Best rate over all successfully evaluated points, including witness lifts.
double unclamped_best(const OuterResult& res) {
    double best = -std::numeric_limits<double>::infinity();
    for (const TracePoint& p : res.trace) {
        if (p.status == SolveStatus::kOptimal) best = std::max(best, p.rate);
    }
    return best;
}

/// Evaluates t (deduplicated against the trace) and updates the incumbent.
/// Returns the fresh solve result, or nullopt when t was a duplicate.
std::optional<inner::InnerSolution> evaluate_point(
    OuterResult& res, const SystemParams& params, const ChannelSet& channels,
    double t, const conic::SolveOptions& options) {
    for (const TracePoint& p : res.trace) {
        if (std::abs(p.t - t) <= kDedupRelTol * std::max(p.t, t)) {
            return std::nullopt;
        }
    }

    const double prev_best = unclamped_best(res);
    inner::InnerSolution sol = inner::solve_inner(params, channels, t, options);
    TracePoint pt;
    pt.t = t;
    pt.status = sol.status;
    if (sol.status == SolveStatus::kOptimal) {
        pt.f_tilde = sol.theta;
        pt.rate = std::log2(1.0 + sol.theta) + std::log2(t);
    }
    res.trace.push_back(pt);

    if (sol.status == SolveStatus::kOptimal && pt.rate > prev_best) {
        res.status = SolveStatus::kOptimal;
        res.t_star = t;
        res.r_upper = std::max(0.0, pt.rate);
        res.inner = sol;
    }
    return sol;
}

/// Problem-infeasible only when no point failed for purely numerical reasons.
void finalize_status(OuterResult& res) {
    if (res.status == SolveStatus::kOptimal) return;
    res.status = SolveStatus::kInfeasible;
    for (const TracePoint& p : res.trace) {
        if (p.status == SolveStatus::kInfeasible) return;
    }
    res.status = SolveStatus::kNumericalFailure;
}

}  // namespace

double t_lower_bound(const SystemParams& params, const ChannelSet& channels) {
    params.validate();
    channels.validate(params);
    double t_min = 1.0;
    for (const auto& h : channels.h_users) {
        const double peak = params.p_total * h.squaredNorm() / params.sigma2_sa;
        t_min = std::min(t_min, 1.0 / (1.0 + peak));
    }
    return t_min;
}

OuterResult maximize_over_t(const SystemParams& params, const ChannelSet& channels,
                            const GridSpec& grid,
                            const conic::SolveOptions& options) {
    if (grid.n_coarse < 8) {
        throw std::invalid_argument("maximize_over_t: n_coarse must be >= 8");
    }
    if (grid.n_refine < 1) {
        throw std::invalid_argument("maximize_over_t: n_refine must be >= 1");
    }

    OuterResult res;
    res.t_min = t_lower_bound(params, channels);

    const double log_tmin = std::log(res.t_min);
    for (int i = 0; i < grid.n_coarse; ++i) {
        const double frac = static_cast<double>(i) / (grid.n_coarse - 1);
        evaluate_point(res, params, channels, std::exp(log_tmin * (1.0 - frac)),
                       options);
    }

    if (res.status == SolveStatus::kOptimal) {
        int best = -1;
        for (int i = 0; i < static_cast<int>(res.trace.size()); ++i) {
            const TracePoint& p = res.trace[i];
            if (p.status == SolveStatus::kOptimal &&
                (best < 0 || p.rate > res.trace[best].rate)) {
                best = i;
            }
        }
        const int last = static_cast<int>(res.trace.size()) - 1;
        const double lo = res.trace[std::max(0, best - 1)].t;
        const double hi = res.trace[std::min(last, best + 1)].t;
        const double log_ratio = std::log(hi / lo);
        for (int j = 0; j <= grid.n_refine; ++j) {
            const double frac = static_cast<double>(j) / grid.n_refine;
            evaluate_point(res, params, channels, lo * std::exp(log_ratio * frac),
                           options);
        }
    }

    finalize_status(res);
    return res;
}

void refine_with_point(OuterResult& result, const SystemParams& params,
                       const ChannelSet& channels, double t, double witness_f,
                       const conic::SolveOptions& options) {
    if (!(t > 0.0)) return;
    const double tc = std::min(t, 1.0);
    std::optional<inner::InnerSolution> sol =
        evaluate_point(result, params, channels, tc, options);

    // A design feasible at tc with inner value witness_f certifies that the
    // exact optimum there is at least witness_f, so the trace entry and the
    // incumbent may be lifted to it regardless of what the solve reported.
    if (witness_f > 0.0) {
        const double wrate = std::log2(1.0 + witness_f) + std::log2(tc);
        TracePoint* pt = nullptr;
        for (TracePoint& p : result.trace) {
            if (std::abs(p.t - tc) <= kDedupRelTol * std::max(p.t, tc)) {
                pt = &p;
                break;
            }
        }
        if (pt != nullptr) {
            const double prev_best = unclamped_best(result);
            if (pt->status != SolveStatus::kOptimal || wrate > pt->rate) {
                pt->status = SolveStatus::kOptimal;
                pt->f_tilde = std::max(pt->f_tilde, witness_f);
                pt->rate = wrate;
            }
            if (wrate > prev_best) {
                result.status = SolveStatus::kOptimal;
                result.t_star = tc;
                result.r_upper = std::max(0.0, wrate);
                if (sol.has_value() && sol->status == SolveStatus::kOptimal) {
                    result.inner = std::move(*sol);
                }
            }
        }
    }
    finalize_status(result);
}

}  // namespace secbeam::outer

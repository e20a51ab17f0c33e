#pragma once

#include <vector>

#include "secbeam/inner.hpp"

namespace secbeam::outer {

using conic::SolveStatus;
using model::ChannelSet;
using model::SystemParams;

struct GridSpec {
    int n_coarse = 32;  // log-spaced points over [t_min, 1], endpoints included
    int n_refine = 16;  // log-uniform subdivisions of the winning bracket
};

struct TracePoint {
    double t = 0.0;
    SolveStatus status = SolveStatus::kNumericalFailure;
    double f_tilde = 0.0;  // inner objective; meaningful iff status optimal
    double rate = 0.0;     // log2(1 + f_tilde) + log2(t); iff status optimal
};

/**
 * Best evaluated point of R(t) = log2(1 + f_tilde(t)) + log2(t). r_upper is
 * floored at zero, matching the zero rate of the silent strategy that every
 * reported achievable rate is clamped against.
 */
struct OuterResult {
    SolveStatus status = SolveStatus::kInfeasible;
    double t_min = 1.0;
    double t_star = 1.0;
    double r_upper = 0.0;  // bits
    inner::InnerSolution inner;      // solution at t_star; valid iff optimal
    std::vector<TracePoint> trace;   // every evaluated point, evaluation order
};

/// min over users of (1 + P ||h_k||^2 / sigma2_sa)^-1, the valid lower end
/// of the t interval (any larger value could exclude the optimum).
double t_lower_bound(const SystemParams& params, const ChannelSet& channels);

/**
 * Coarse log-spaced grid over [t_min, 1] followed by one log-uniform
 * refinement pass inside the bracket around the best coarse point.
 * Refinement points sit at fractions i/n_refine of the bracket, so doubling
 * n_refine evaluates a superset of points and never lowers r_upper.
 * Infeasible or failed points are recorded in the trace and skipped; if no
 * point is feasible the outcome is problem-infeasible with zero rate.
 */
OuterResult maximize_over_t(const SystemParams& params, const ChannelSet& channels,
                            const GridSpec& grid = {},
                            const conic::SolveOptions& options = {});

/**
 * Evaluates one extra t point and folds it into the running maximum
 * (the solve is skipped when t is within 1e-12 relative of an already-traced
 * point). witness_f > 0 asserts that the caller holds a design that is
 * feasible at this t and attains inner value witness_f, so the folded value
 * never drops below it even when the solve is inaccurate or fails. Used by
 * the pipeline to anchor r_upper at eavesdropper-rate-derived points.
 */
void refine_with_point(OuterResult& result, const SystemParams& params,
                       const ChannelSet& channels, double t,
                       double witness_f = 0.0,
                       const conic::SolveOptions& options = {});

}  // namespace secbeam::outer

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "shadowlab/types.hpp"

namespace shadowlab {

using RhsFunction = std::function<Vector(double, const Vector&)>;

struct SolverOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double blowup_threshold = 1e8;
    /// Steps shorter than this fraction of max(1, |t|) count as underflow.
    double min_step_factor = 1e-14;
    /// Record every accepted step instead of only the requested output times.
    bool record_steps = false;
};

struct SolverResult {
    std::vector<double> t;
    std::vector<Vector> x;
    bool blew_up = false;
    bool underflow = false;
    double stop_time = 0.0;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

/// Dormand-Prince 5(4) with per-step error control. `times` is the monotone
/// output grid (increasing or decreasing); its first entry is the initial
/// time. Steps are clipped to land exactly on every output time.
///
/// Stops early (flagging blew_up) when the accepted state leaves the
/// blow-up threshold or turns non-finite, and (flagging underflow) when
/// the controller asks for a step below the underflow limit. A non-finite
/// right-hand side at an accepted state throws EvaluationError.
[[nodiscard]] SolverResult solve_ivp(const RhsFunction& rhs, const Vector& x0, std::span<const double> times,
                                     const SolverOptions& options = {});

}  // namespace shadowlab

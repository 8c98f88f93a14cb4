#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "shadowlab/certify.hpp"
#include "shadowlab/linear_dynamics.hpp"
#include "shadowlab/pseudo.hpp"
#include "shadowlab/region.hpp"
#include "shadowlab/systems.hpp"

namespace shadowlab {

struct ShadowResult {
    Trajectory solution;
    /// The pseudosolution on the same grid as `solution`.
    Trajectory pseudo;
    double sigma = 0.0;
    double sup_dist = 0.0;
    /// kappa * sigma.
    double bound = 0.0;
    /// Numerical slack allowed on top of `bound`.
    double tolerance = 0.0;
    double quadrature_error = 0.0;
    double truncation_error = 0.0;
    int iterations = 0;
    std::vector<double> ratios;
    /// max |x' - g(t, x)| over the grid, x' by finite differences.
    double residual = 0.0;
    bool passed = false;
    /// Log-norm route only: |x - y| < sigma / m at every grid point.
    bool strict_bound = true;
    /// Log-norm route only: the solution blew up before the horizon.
    bool hypothesis_refuted = false;

    [[nodiscard]] double max_ratio() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Header `t,y1..yn,x1..xn,dist`.
void write_shadow_csv(std::ostream& os, const ShadowResult& r, NormKind k);

struct PicardOptions {
    double tol = 1e-10;
    int max_iter = 500;
    /// Halve the grid this many times (when the pseudosolution can be
    /// resampled) and Richardson-combine the last two levels.
    int refinements = 1;
    /// Iterate differences below this are treated as converged noise when
    /// computing contraction ratios.
    double ratio_floor = 1e-13;
};

/// Fixed point of the dichotomy integral operator by Picard iteration from
/// z = 0; returns x = y + z. Throws AdmissibilityError when sigma > eps0 and
/// NonConvergence after max_iter sweeps.
[[nodiscard]] ShadowResult shadow_dichotomy(const OdeSystem& sys, const DichotomyData& d, const PseudoSolution& y,
                                            const Certificate& cert, const PicardOptions& opts = {});

/// Integrates the true solution from x(0) = y(0) and compares it with y.
[[nodiscard]] ShadowResult shadow_lognorm(const OdeSystem& sys, const PseudoSolution& y, const Certificate& cert,
                                          const Region& H, double tol = 1e-10);

struct RelocateOptions {
    double tol = 1e-10;
    int max_iter = 2000;
    double omega = 0.5;
    int refinements = 1;
    /// Sublinear bound |f(t, x)| <= L |x| on B_rho(0); sampled when absent.
    std::optional<double> L;
    long samples = 2000;
    std::uint64_t seed = 1;
};

struct RelocateResult {
    PseudoSolution z;
    double L = 0.0;
    double eps = 0.0;
    int iterations = 0;
    std::vector<double> ratios;
    /// max |e_z - e_y| over the grid.
    double error_mismatch = 0.0;
    double sup_norm = 0.0;
    double truncation_error = 0.0;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Damped fixed-point iteration for a pseudosolution z in B_rho(0) with the
/// same error function as y. Throws AdmissibilityError when sigma_y > eps,
/// NotApplicableError when eps <= 0, NonConvergence after max_iter.
[[nodiscard]] RelocateResult relocate(const OdeSystem& sys, const DichotomyData& d, const PseudoSolution& y, double rho,
                                      const RelocateOptions& opts = {});

}  // namespace shadowlab

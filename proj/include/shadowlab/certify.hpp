#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shadowlab/linear_dynamics.hpp"
#include "shadowlab/region.hpp"
#include "shadowlab/systems.hpp"

namespace shadowlab {

enum class Route { T1, T2, BallCor, GenPerturb, PolyPerturb, LogNorm };

[[nodiscard]] std::string to_string(Route r);
[[nodiscard]] Route parse_route(const std::string& name);

/// Constants that produced a certificate. Unused entries stay empty.
struct Assumptions {
    std::optional<double> N, lambda, L, m, delta, rho;
    std::vector<double> growth;
    std::optional<DichotomyKind> kind;
    std::string region;
    NormKind norm = NormKind::Inf;
};

/// (eps0, kappa): every pseudosolution in H with sigma <= eps <= eps0 lies
/// within kappa * eps of a true solution.
struct Certificate {
    double eps0 = 0.0;
    double kappa = 0.0;
    Route route = Route::T1;
    Assumptions assumptions;
    /// False when a constant came from sampling (evidence rather than proof).
    bool exact = true;
    long samples = 0;
    std::optional<std::uint64_t> seed;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Dichotomy route: needs L < lambda / (2N); kappa = 2N / (lambda - 2NL).
[[nodiscard]] Certificate certify_t1(double N, double lambda, double L, double delta);
/// Contraction / expansion route: needs L < lambda / N; kappa = N / (lambda - NL).
[[nodiscard]] Certificate certify_t2(double N, double lambda, double L, double delta, DichotomyKind kind);
/// H = B_rho(0) with L bounding |f_x| on B_{rho + delta}(0).
[[nodiscard]] Certificate certify_ball(double N, double lambda, double L, double rho, double delta,
                                       DichotomyKind kind);
/// |f_x(t, x)| <= L1 + L2 |x| + ... + L_{k+1} |x|^k on H = B_rho(0). The
/// neighbourhood delta is placed by bisection so that p(rho + delta) sits
/// midway between p(rho) and the threshold.
[[nodiscard]] Certificate certify_gen_perturb(double N, double lambda, const std::vector<double>& growth, double rho,
                                              DichotomyKind kind);
/// mu(g_x) <= -m on N_delta(H): eps0 = m delta, kappa = 1 / m.
[[nodiscard]] Certificate certify_lognorm(double m, double delta);

/// Threshold on the nonlinearity for a dichotomy kind: lambda/(2N) or lambda/N.
[[nodiscard]] double growth_threshold(double N, double lambda, DichotomyKind kind);
[[nodiscard]] double eval_growth(const std::vector<double>& growth, double r);

/// A supremum over a region: sampled (a lower bound on the true sup) unless
/// `exact`.
struct SupEstimate {
    double value = 0.0;
    bool exact = false;
    long samples = 0;
    Vector witness;
    double witness_t = 0.0;
};

struct SampleOptions {
    long samples = 2000;
    std::uint64_t seed = 1;
    /// Times at which time-dependent fields are probed.
    std::vector<double> times = {0.0, 1.0, 2.0, 5.0, 10.0};
    /// Use the closed-form suprema of the registered examples when available.
    bool closed_form = true;
};

/// max |f_x(t, x)|_k over conv(N_delta(H)). Throws StructureError without a split.
[[nodiscard]] SupEstimate estimate_lipschitz(const OdeSystem& sys, const Region& H, double delta, NormKind k,
                                             const SampleOptions& opts = {});

/// m = -sup mu_k(g_x(t, x)) over N_delta(H). Throws HypothesisViolated with
/// the worst point when m <= 0.
[[nodiscard]] SupEstimate estimate_m(const OdeSystem& sys, const Region& H, double delta, NormKind k,
                                     const SampleOptions& opts = {});

}  // namespace shadowlab

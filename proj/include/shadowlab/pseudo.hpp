#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shadowlab/region.hpp"
#include "shadowlab/systems.hpp"

namespace shadowlab {

/// Grid function y with derivative samples and its error function e_y.
struct PseudoSolution {
    Trajectory traj;
    std::vector<Vector> deriv;
    std::vector<double> err;
    double sigma = 0.0;
    NormKind norm = NormKind::Inf;
    std::string source;
    bool analytic_derivative = false;
    std::optional<std::uint64_t> seed;
    double amplitude = 0.0;
    /// Bound on how far y may stray between grid points (containment is only
    /// checked at grid points).
    double excursion_bound = 0.0;
    /// Re-evaluates the same pseudosolution on another grid, when the
    /// generator can (used for quadrature refinement).
    std::function<PseudoSolution(std::span<const double>)> resample;

    [[nodiscard]] std::size_t size() const { return traj.size(); }
    [[nodiscard]] Eigen::Index dim() const { return traj.dim(); }
};

/// Fills err and sigma from the stored derivative samples, or from
/// fourth-order finite differences when `deriv` is empty (needs >= 5 points).
[[nodiscard]] PseudoSolution measure(Trajectory y, std::vector<Vector> deriv, const OdeSystem& sys, NormKind k);

/// Derivative of grid data by 5-point finite differences (Fornberg weights,
/// one-sided near the ends). Needs at least 5 points.
[[nodiscard]] std::vector<Vector> fd_derivative(std::span<const double> t, const std::vector<Vector>& x);

/// y(t) = -1/2 + delta tanh(delta t) against x' = -(x + 1/2)^2; e_y = delta^2.
[[nodiscard]] PseudoSolution exm_pseudosolution(double delta, std::span<const double> grid);

struct PerturbOptions {
    /// Output grid size; 0 picks one point per 0.01 time units (at least 201).
    std::size_t points = 0;
    double tol = 1e-10;
    NormKind norm = NormKind::Inf;
    int modes = 5;
};

/// Integrates y' = g(t, y) + eta(t) with eta a seeded sum of sinusoids whose
/// norm never exceeds `amplitude`. Throws ContainmentError if a grid point
/// leaves H (or the orbit blows up) before T.
[[nodiscard]] PseudoSolution perturbed_orbit(const OdeSystem& sys, const Vector& x0, double T, double amplitude,
                                             std::uint64_t seed, const Region& H, const PerturbOptions& opts = {});

/// y(t) = center + sum of seeded sinusoids with analytic derivative, scaled
/// down until sigma <= target_sigma. Useful where forward orbits are unstable.
[[nodiscard]] PseudoSolution oscillating_pseudosolution(const OdeSystem& sys, const Vector& center, double T,
                                                        std::size_t points, double target_sigma,
                                                        std::uint64_t seed, NormKind k = NormKind::Inf);

/// y(t) = p on the grid; e_y = |g(t, p)|.
[[nodiscard]] PseudoSolution constant_pseudosolution(const OdeSystem& sys, const Vector& p,
                                                     std::span<const double> grid, NormKind k = NormKind::Inf);

/// Header `t,y1..yn,e`, 17 significant digits.
void write_pseudo_csv(std::ostream& os, const PseudoSolution& y);
[[nodiscard]] nlohmann::json pseudo_json(const PseudoSolution& y);

}  // namespace shadowlab

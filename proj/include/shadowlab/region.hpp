#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "shadowlab/types.hpp"

namespace shadowlab {

enum class RegionShape { Ball, Box, HalfLine, SimplexGamma, Whole, Custom };

/// The prescribed set H, its closed delta-neighbourhoods N_delta(H) measured in
/// the active norm, and samplers for both.
class Region {
public:
    using Predicate = std::function<bool(const Vector&)>;
    using Sampler = std::function<Vector(std::mt19937_64&)>;
    using Distance = std::function<double(const Vector&)>;

    static Region ball(Vector center, double radius, NormKind k = NormKind::Inf);
    static Region box(Vector lo, Vector hi, NormKind k = NormKind::Inf);
    /// [a, inf)^n; sampling covers [a, a + span]^n.
    static Region half_line(Eigen::Index n, double a, NormKind k = NormKind::Inf, double span = 10.0);
    /// Gamma_c = {S >= 0, I >= 0, S + I <= 1 - c}.
    static Region simplex_gamma(double c, NormKind k = NormKind::Inf);
    static Region whole(Eigen::Index n, NormKind k = NormKind::Inf, double span = 10.0);
    static Region custom(Eigen::Index n, Predicate contains, Sampler sampler, std::optional<Distance> distance,
                         NormKind k, std::string description);

    [[nodiscard]] bool contains(const Vector& x) const;
    /// Distance to H in the active norm (0 inside).
    [[nodiscard]] double distance(const Vector& x) const;
    [[nodiscard]] bool in_neighborhood(const Vector& x, double delta) const { return distance(x) <= delta; }

    [[nodiscard]] Vector sample(std::mt19937_64& rng) const;
    /// Deterministic candidates for the extremes of N_delta(H) (vertices pushed outward).
    [[nodiscard]] std::vector<Vector> extreme_points(double delta) const;
    [[nodiscard]] std::vector<Vector> sample_neighborhood(double delta, std::size_t count, std::mt19937_64& rng) const;
    /// Samples of conv(N_delta(H)); random convex combinations for non-box shapes.
    [[nodiscard]] std::vector<Vector> sample_hull(double delta, std::size_t count, std::mt19937_64& rng) const;

    [[nodiscard]] RegionShape shape() const { return shape_; }
    [[nodiscard]] NormKind norm() const { return norm_; }
    [[nodiscard]] Eigen::Index dim() const { return n_; }
    [[nodiscard]] std::string describe() const;

    [[nodiscard]] const Vector& center() const { return lo_; }
    [[nodiscard]] double radius() const { return radius_; }
    [[nodiscard]] const Vector& lower() const { return lo_; }
    [[nodiscard]] const Vector& upper() const { return hi_; }
    [[nodiscard]] double gamma_c() const { return radius_; }

private:
    Region() = default;

    RegionShape shape_ = RegionShape::Whole;
    NormKind norm_ = NormKind::Inf;
    Eigen::Index n_ = 0;
    Vector lo_, hi_;
    double radius_ = 0.0;
    double span_ = 10.0;
    Predicate predicate_;
    Sampler sampler_;
    std::optional<Distance> distance_;
    std::string description_;
};

/// Directions d with |d|_k = 1 at the corners of the unit ball of the norm.
[[nodiscard]] std::vector<Vector> unit_ball_extremes(Eigen::Index n, NormKind k);

/// Random vector with |v|_k <= radius; on the sphere when `on_boundary`.
[[nodiscard]] Vector random_in_ball(Eigen::Index n, double radius, NormKind k, bool on_boundary, std::mt19937_64& rng);

}  // namespace shadowlab

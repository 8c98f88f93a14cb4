#include "shadowlab/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shadowlab/errors.hpp"

namespace shadowlab {

std::vector<Vector> unit_ball_extremes(Eigen::Index n, NormKind k) {
    std::vector<Vector> dirs;
    auto add_axes = [&] {
        for (Eigen::Index i = 0; i < n; ++i) {
            Vector e = Vector::Zero(n);
            e(i) = 1.0;
            dirs.push_back(e);
            dirs.push_back(-e);
        }
    };
    auto add_signs = [&](double scale) {
        if (n > 12) return;
        const long combos = 1L << n;
        for (long mask = 0; mask < combos; ++mask) {
            Vector v(n);
            for (Eigen::Index i = 0; i < n; ++i) v(i) = ((mask >> i) & 1) ? -scale : scale;
            dirs.push_back(v);
        }
    };
    switch (k) {
        case NormKind::Inf: add_signs(1.0); break;
        case NormKind::One: add_axes(); break;
        case NormKind::Two:
            add_axes();
            if (n > 1) add_signs(1.0 / std::sqrt(static_cast<double>(n)));
            break;
    }
    return dirs;
}

Vector random_in_ball(Eigen::Index n, double radius, NormKind k, bool on_boundary, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(n);
    double len = 0.0;
    do {
        for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
        len = vector_norm(v, k);
    } while (len < 1e-12);
    std::uniform_real_distribution<double> r01(0.0, 1.0);
    const double r = on_boundary ? 1.0 : std::pow(r01(rng), 1.0 / static_cast<double>(n));
    return v * (radius * r / len);
}

Region Region::ball(Vector center, double radius, NormKind k) {
    if (!(radius >= 0.0)) throw ArgumentError("ball radius must be nonnegative");
    Region r;
    r.shape_ = RegionShape::Ball;
    r.norm_ = k;
    r.n_ = center.size();
    r.lo_ = std::move(center);
    r.radius_ = radius;
    return r;
}

Region Region::box(Vector lo, Vector hi, NormKind k) {
    if (lo.size() != hi.size()) throw DimensionError("box bounds differ in dimension");
    if ((hi - lo).minCoeff() < 0.0) throw ArgumentError("box lower bound exceeds upper bound");
    Region r;
    r.shape_ = RegionShape::Box;
    r.norm_ = k;
    r.n_ = lo.size();
    r.lo_ = std::move(lo);
    r.hi_ = std::move(hi);
    return r;
}

Region Region::half_line(Eigen::Index n, double a, NormKind k, double span) {
    if (n <= 0) throw DimensionError("region dimension must be positive");
    if (!(span > 0.0)) throw ArgumentError("half-line sampling span must be positive");
    Region r;
    r.shape_ = RegionShape::HalfLine;
    r.norm_ = k;
    r.n_ = n;
    r.lo_ = Vector::Constant(n, a);
    r.hi_ = Vector::Constant(n, std::numeric_limits<double>::infinity());
    r.span_ = span;
    return r;
}

Region Region::simplex_gamma(double c, NormKind k) {
    if (!(c >= 0.0 && c < 1.0)) throw ArgumentError("Gamma_c needs 0 <= c < 1");
    Region r;
    r.shape_ = RegionShape::SimplexGamma;
    r.norm_ = k;
    r.n_ = 2;
    r.radius_ = c;
    return r;
}

Region Region::whole(Eigen::Index n, NormKind k, double span) {
    Region r;
    r.shape_ = RegionShape::Whole;
    r.norm_ = k;
    r.n_ = n;
    r.span_ = span;
    return r;
}

Region Region::custom(Eigen::Index n, Predicate contains, Sampler sampler, std::optional<Distance> distance,
                      NormKind k, std::string description) {
    Region r;
    r.shape_ = RegionShape::Custom;
    r.norm_ = k;
    r.n_ = n;
    r.predicate_ = std::move(contains);
    r.sampler_ = std::move(sampler);
    r.distance_ = std::move(distance);
    r.description_ = std::move(description);
    return r;
}

bool Region::contains(const Vector& x) const {
    if (x.size() != n_) throw DimensionError("point dimension does not match region");
    switch (shape_) {
        case RegionShape::Ball: return vector_norm(x - lo_, norm_) <= radius_;
        case RegionShape::Box:
        case RegionShape::HalfLine: return (x - lo_).minCoeff() >= 0.0 && (hi_ - x).minCoeff() >= 0.0;
        case RegionShape::SimplexGamma: return x(0) >= 0.0 && x(1) >= 0.0 && x(0) + x(1) <= 1.0 - radius_;
        case RegionShape::Whole: return true;
        case RegionShape::Custom: return predicate_(x);
    }
    return false;
}

namespace {

double segment_distance(const Vector& x, const Vector& a, const Vector& b, NormKind k) {
    // |x - (a + u (b - a))| is convex in u.
    auto f = [&](double u) { return vector_norm(x - a - u * (b - a), k); };
    double lo = 0.0, hi = 1.0;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
    double f1 = f(m1), f2 = f(m2);
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        if (f1 <= f2) {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - phi * (hi - lo);
            f1 = f(m1);
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + phi * (hi - lo);
            f2 = f(m2);
        }
    }
    return std::min({f(0.0), f(1.0), f1, f2});
}

}  // namespace

double Region::distance(const Vector& x) const {
    if (x.size() != n_) throw DimensionError("point dimension does not match region");
    switch (shape_) {
        case RegionShape::Ball: return std::max(0.0, vector_norm(x - lo_, norm_) - radius_);
        case RegionShape::Box:
        case RegionShape::HalfLine: {
            // Coordinate clamping is the nearest point for every p-norm.
            const Vector clamped = x.cwiseMax(lo_).cwiseMin(hi_);
            return vector_norm(x - clamped, norm_);
        }
        case RegionShape::SimplexGamma: {
            if (contains(x)) return 0.0;
            const double top = 1.0 - radius_;
            Vector v0(2), v1(2), v2(2);
            v0 << 0.0, 0.0;
            v1 << top, 0.0;
            v2 << 0.0, top;
            return std::min({segment_distance(x, v0, v1, norm_), segment_distance(x, v1, v2, norm_),
                             segment_distance(x, v2, v0, norm_)});
        }
        case RegionShape::Whole: return 0.0;
        case RegionShape::Custom:
            if (distance_) return (*distance_)(x);
            return predicate_(x) ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

Vector Region::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    switch (shape_) {
        case RegionShape::Ball: {
            Vector d = random_in_ball(n_, radius_, norm_, u01(rng) < 0.2, rng);
            // Boundary samples can round a few ulps outside.
            while (!contains(lo_ + d)) d *= 1.0 - std::numeric_limits<double>::epsilon();
            return lo_ + d;
        }
        case RegionShape::Box: {
            Vector x(n_);
            for (Eigen::Index i = 0; i < n_; ++i) x(i) = lo_(i) + u01(rng) * (hi_(i) - lo_(i));
            return x;
        }
        case RegionShape::HalfLine: {
            Vector x(n_);
            for (Eigen::Index i = 0; i < n_; ++i) x(i) = lo_(i) + u01(rng) * span_;
            return x;
        }
        case RegionShape::SimplexGamma: {
            double a = u01(rng), b = u01(rng);
            if (a + b > 1.0) {
                a = 1.0 - a;
                b = 1.0 - b;
            }
            Vector x(2);
            x << (1.0 - radius_) * a, (1.0 - radius_) * b;
            return x;
        }
        case RegionShape::Whole: {
            Vector x(n_);
            for (Eigen::Index i = 0; i < n_; ++i) x(i) = (2.0 * u01(rng) - 1.0) * span_;
            return x;
        }
        case RegionShape::Custom: return sampler_(rng);
    }
    return Vector::Zero(n_);
}

std::vector<Vector> Region::extreme_points(double delta) const {
    std::vector<Vector> vertices;
    switch (shape_) {
        case RegionShape::Ball: {
            std::vector<Vector> out;
            for (const auto& d : unit_ball_extremes(n_, norm_)) out.push_back(lo_ + (radius_ + delta) * d);
            return out;
        }
        case RegionShape::Box: {
            if (n_ > 12) break;
            for (long mask = 0; mask < (1L << n_); ++mask) {
                Vector v(n_);
                for (Eigen::Index i = 0; i < n_; ++i) v(i) = ((mask >> i) & 1) ? hi_(i) : lo_(i);
                vertices.push_back(v);
            }
            break;
        }
        case RegionShape::HalfLine: vertices.push_back(lo_); break;
        case RegionShape::SimplexGamma: {
            const double top = 1.0 - radius_;
            Vector v0(2), v1(2), v2(2);
            v0 << 0.0, 0.0;
            v1 << top, 0.0;
            v2 << 0.0, top;
            vertices = {v0, v1, v2};
            break;
        }
        case RegionShape::Whole:
        case RegionShape::Custom: return {};
    }
    std::vector<Vector> out;
    const auto dirs = unit_ball_extremes(n_, norm_);
    for (const auto& v : vertices) {
        out.push_back(v);
        if (delta > 0.0) {
            for (const auto& d : dirs) out.push_back(v + delta * d);
        }
    }
    return out;
}

std::vector<Vector> Region::sample_neighborhood(double delta, std::size_t count, std::mt19937_64& rng) const {
    if (delta < 0.0) throw ArgumentError("neighbourhood radius must be nonnegative");
    std::vector<Vector> out = extreme_points(delta);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    while (out.size() < count) {
        Vector x = sample(rng);
        if (delta > 0.0) x += random_in_ball(n_, delta, norm_, u01(rng) < 0.3, rng);
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<Vector> Region::sample_hull(double delta, std::size_t count, std::mt19937_64& rng) const {
    auto pts = sample_neighborhood(delta, count, rng);
    if (shape_ != RegionShape::SimplexGamma && shape_ != RegionShape::Custom) return pts;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    const std::size_t base = pts.size();
    for (std::size_t i = 0; i < base; ++i) {
        const double w = u01(rng);
        pts.push_back(w * pts[pick(rng)] + (1.0 - w) * pts[pick(rng)]);
    }
    return pts;
}

std::string Region::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (shape_) {
        case RegionShape::Ball: os << "ball(center=" << lo_.transpose() << ", radius=" << radius_ << ")"; break;
        case RegionShape::Box: os << "box(lo=" << lo_.transpose() << ", hi=" << hi_.transpose() << ")"; break;
        case RegionShape::HalfLine: os << "half_line(a=" << lo_(0) << ", n=" << n_ << ")"; break;
        case RegionShape::SimplexGamma: os << "gamma(c=" << radius_ << ")"; break;
        case RegionShape::Whole: os << "whole(n=" << n_ << ")"; break;
        case RegionShape::Custom: os << "custom(" << description_ << ")"; break;
    }
    os << " norm=" << to_string(norm_);
    return os.str();
}

}  // namespace shadowlab

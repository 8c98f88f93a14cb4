#include <doctest.h>

#include <cmath>
#include <random>

#include "shadowlab/errors.hpp"
#include "shadowlab/region.hpp"

using namespace shadowlab;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

// Brute-force distance to Gamma_c over a fine grid of the triangle.
double gamma_distance_grid(const Vector& x, double c, NormKind k) {
    const double top = 1.0 - c;
    const int m = 400;
    double best = 1e300;
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; i + j <= m; ++j) {
            const Vector p = vec2(top * i / m, top * j / m);
            best = std::min(best, vector_norm(x - p, k));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("ball membership and distance") {
    const auto b = Region::ball(Vector::Zero(2), 1.0, NormKind::One);
    CHECK(b.contains(vec2(0.5, 0.5)));
    CHECK_FALSE(b.contains(vec2(0.6, 0.5)));
    CHECK(b.distance(vec2(2.0, 1.0)) == doctest::Approx(2.0));
    CHECK(b.distance(vec2(0.1, 0.1)) == 0.0);
    CHECK(b.in_neighborhood(vec2(1.0, 0.5), 0.5));
    CHECK_THROWS_AS((void)Region::ball(Vector::Zero(1), -1.0), ArgumentError);
    CHECK_THROWS_AS((void)b.contains(Vector::Zero(3)), DimensionError);
}

TEST_CASE("box and half-line distances use clamping") {
    const auto box = Region::box(vec2(0.0, 0.0), vec2(1.0, 2.0), NormKind::Two);
    CHECK(box.distance(vec2(4.0, 6.0)) == doctest::Approx(5.0));
    CHECK(box.distance(vec2(0.5, 3.0)) == doctest::Approx(1.0));
    const auto hl = Region::half_line(1, -0.5);
    CHECK(hl.contains(Vector::Constant(1, 1e6)));
    CHECK(hl.distance(Vector::Constant(1, -0.75)) == doctest::Approx(0.25));
    CHECK_THROWS_AS((void)Region::box(vec2(1.0, 0.0), vec2(0.0, 1.0)), ArgumentError);
}

TEST_CASE("Gamma_c distance agrees with a brute-force grid") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (NormKind k : kAllNorms) {
        for (int i = 0; i < 25; ++i) {
            const Vector x = vec2(u(rng), u(rng));
            const auto g = Region::simplex_gamma(0.2, k);
            const double d = g.distance(x);
            CHECK(d <= gamma_distance_grid(x, 0.2, k) + 1e-12);
            CHECK(d >= gamma_distance_grid(x, 0.2, k) - 5e-3);
        }
    }
    CHECK_THROWS_AS((void)Region::simplex_gamma(1.0), ArgumentError);
}

TEST_CASE("samples stay where they belong") {
    std::mt19937_64 rng(11);
    const std::vector<Region> regions{Region::ball(vec2(1.0, -1.0), 0.5, NormKind::Two),
                                      Region::box(vec2(0.0, 0.0), vec2(1.0, 3.0)), Region::half_line(2, 0.0),
                                      Region::simplex_gamma(0.3)};
    for (const auto& r : regions) {
        for (int i = 0; i < 200; ++i) CHECK(r.contains(r.sample(rng)));
        const double delta = 0.1;
        for (const auto& x : r.sample_neighborhood(delta, 300, rng)) CHECK(r.distance(x) <= delta + 1e-12);
        CHECK(!r.describe().empty());
    }
}

TEST_CASE("extreme points of a ball neighbourhood lie on its boundary") {
    for (NormKind k : kAllNorms) {
        const auto b = Region::ball(Vector::Zero(3), 1.0, k);
        const auto pts = b.extreme_points(0.5);
        CHECK(!pts.empty());
        for (const auto& p : pts) CHECK(vector_norm(p, k) == doctest::Approx(1.5));
    }
}

TEST_CASE("unit ball extremes have unit norm") {
    for (NormKind k : kAllNorms) {
        for (Eigen::Index n : {1, 2, 4}) {
            for (const auto& d : unit_ball_extremes(n, k)) CHECK(vector_norm(d, k) == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("random_in_ball respects the radius") {
    std::mt19937_64 rng(2);
    for (NormKind k : kAllNorms) {
        for (int i = 0; i < 100; ++i) {
            CHECK(vector_norm(random_in_ball(3, 0.7, k, false, rng), k) <= 0.7 + 1e-12);
            CHECK(vector_norm(random_in_ball(3, 0.7, k, true, rng), k) == doctest::Approx(0.7));
        }
    }
}

TEST_CASE("custom region without a distance reports infinity outside") {
    const auto r = Region::custom(
        1, [](const Vector& x) { return x(0) > 0.0; }, [](std::mt19937_64&) { return Vector::Ones(1); }, std::nullopt,
        NormKind::Inf, "positive");
    CHECK(r.distance(Vector::Ones(1)) == 0.0);
    CHECK(std::isinf(r.distance(-Vector::Ones(1))));
}

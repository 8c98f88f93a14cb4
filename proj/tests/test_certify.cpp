#include <doctest.h>

#include <cmath>
#include <random>

#include "shadowlab/certify.hpp"
#include "shadowlab/errors.hpp"

using namespace shadowlab;

TEST_CASE("dichotomy route constants") {
    auto c = certify_t1(1.0, 1.0, 0.0, 1.0);
    CHECK(c.kappa == doctest::Approx(2.0));
    CHECK(c.eps0 == doctest::Approx(0.5));
    c = certify_t1(1.0, 1.0, 0.25, 0.4);
    CHECK(c.kappa == doctest::Approx(4.0));
    CHECK(c.eps0 == doctest::Approx(0.1));
    CHECK(c.route == Route::T1);
    CHECK_THROWS_AS((void)certify_t1(1.0, 1.0, 0.5, 1.0), NotApplicableError);
    CHECK_THROWS_AS((void)certify_t1(0.0, 1.0, 0.1, 1.0), ArgumentError);
}

TEST_CASE("contraction route constants") {
    auto c = certify_t2(1.0, 1.0, 0.0, 1.0, DichotomyKind::Contraction);
    CHECK(c.kappa == doctest::Approx(1.0));
    c = certify_t2(1.0, 1.0, 0.6, 1.0, DichotomyKind::Expansion);
    CHECK(c.kappa == doctest::Approx(2.5));
    CHECK(c.eps0 == doctest::Approx(0.4));
    CHECK_THROWS_AS((void)certify_t1(1.0, 1.0, 0.6, 1.0), NotApplicableError);
    CHECK_THROWS_AS((void)certify_t2(2.0, 1.0, 0.5, 1.0, DichotomyKind::Contraction), NotApplicableError);
    CHECK_THROWS_AS((void)certify_t2(1.0, 1.0, 0.1, 1.0, DichotomyKind::Dichotomy), ArgumentError);
}

TEST_CASE("kappa solves its fixed-point relation") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 3.0), frac(0.0, 0.99);
    for (int i = 0; i < 200; ++i) {
        const double N = u(rng), lambda = u(rng);
        const double L1 = frac(rng) * lambda / (2.0 * N);
        const auto c1 = certify_t1(N, lambda, L1, 0.5);
        CHECK(std::abs((2.0 * N / lambda) * (L1 * c1.kappa + 1.0) - c1.kappa) <= 1e-12 * std::max(1.0, c1.kappa));
        CHECK(c1.eps0 * c1.kappa == doctest::Approx(0.5));
        const double L2 = frac(rng) * lambda / N;
        const auto c2 = certify_t2(N, lambda, L2, 0.5, DichotomyKind::Contraction);
        CHECK(std::abs((N / lambda) * (L2 * c2.kappa + 1.0) - c2.kappa) <= 1e-12 * std::max(1.0, c2.kappa));
    }
}

TEST_CASE("growth-bound route reproduces the 0 < rho < 1/2 window") {
    const std::vector<double> g{0.0, 2.0};
    for (double rho : {0.1, 0.3, 0.49}) {
        const auto c = certify_gen_perturb(1.0, 1.0, g, rho, DichotomyKind::Contraction);
        CHECK(c.route == Route::GenPerturb);
        CHECK(c.eps0 > 0.0);
        CHECK(*c.assumptions.L < 1.0);
        CHECK(*c.assumptions.L == doctest::Approx(0.5 * (2.0 * rho + 1.0)));
    }
    CHECK_THROWS_AS((void)certify_gen_perturb(1.0, 1.0, g, 0.5, DichotomyKind::Contraction), NotApplicableError);
    CHECK_THROWS_AS((void)certify_gen_perturb(1.0, 1.0, g, 0.51, DichotomyKind::Contraction), NotApplicableError);
    CHECK_THROWS_WITH_AS((void)certify_gen_perturb(1.0, 1.0, {0.6}, 0.1, DichotomyKind::Dichotomy),
                         doctest::Contains("no rho"), NotApplicableError);
    const auto cubic = certify_gen_perturb(1.0, 1.0, {0.1, 0.0, 1.0}, 0.5, DichotomyKind::Dichotomy);
    CHECK(cubic.route == Route::PolyPerturb);
    CHECK(*cubic.assumptions.L < 0.5);
    const auto flat = certify_gen_perturb(1.0, 1.0, {0.2}, 0.3, DichotomyKind::Contraction);
    CHECK(*flat.assumptions.delta == doctest::Approx(0.3));
}

TEST_CASE("ball corollary carries the radius") {
    const auto c = certify_ball(1.0, 1.0, 0.8, 0.3, 0.1, DichotomyKind::Contraction);
    CHECK(c.route == Route::BallCor);
    CHECK(c.kappa == doctest::Approx(5.0));
    CHECK(c.eps0 == doctest::Approx(0.02));
    CHECK(*c.assumptions.rho == 0.3);
}

TEST_CASE("log-norm route") {
    auto c = certify_lognorm(1.0, 1.0);
    CHECK(c.eps0 == 1.0);
    CHECK(c.kappa == 1.0);
    c = certify_lognorm(0.2, 0.1);
    CHECK(c.eps0 == doctest::Approx(0.02));
    CHECK(c.kappa == doctest::Approx(5.0));
    CHECK_THROWS_AS((void)certify_lognorm(0.0, 0.1), ArgumentError);
    CHECK_THROWS_AS((void)certify_lognorm(0.1, -1.0), ArgumentError);
}

TEST_CASE("certificate JSON") {
    auto c = certify_lognorm(0.2, 0.1);
    const auto j = c.to_json();
    CHECK(j["route"] == to_string(Route::LogNorm));
    CHECK(j["status"] == "exact");
    CHECK(j["kappa"].get<double>() == doctest::Approx(5.0));
    CHECK(j["seed"].is_null());
    c.exact = false;
    CHECK(c.to_json()["status"] == "evidence");
    for (Route r : {Route::T1, Route::T2, Route::BallCor, Route::GenPerturb, Route::PolyPerturb, Route::LogNorm}) {
        CHECK(parse_route(to_string(r)) == r);
    }
    CHECK_THROWS_AS((void)parse_route("bogus"), ArgumentError);
}

TEST_CASE("Lipschitz estimates") {
    const auto exm = exm_system();
    const auto ball = Region::ball(Vector::Zero(1), 0.3);
    const auto e = estimate_lipschitz(exm, ball, 0.1, NormKind::Inf);
    CHECK(e.exact);
    CHECK(e.value == doctest::Approx(0.8));
    SampleOptions sampled;
    sampled.closed_form = false;
    const auto s = estimate_lipschitz(exm, ball, 0.1, NormKind::Inf, sampled);
    CHECK_FALSE(s.exact);
    CHECK(s.value <= 0.8 + 1e-12);
    CHECK(s.value >= 0.79);

    Matrix a = Matrix::Zero(2, 2);
    Polynomial b1{{0.5, {1, 0}}, {-0.2, {0, 1}}};
    Polynomial b2{{0.3, {0, 1}}};
    const auto lin = linear_poly_system(a, {b1, b2});
    Matrix B(2, 2);
    B << 0.5, -0.2, 0.0, 0.3;
    for (NormKind k : kAllNorms) {
        const auto est = estimate_lipschitz(lin, Region::box(Vector::Zero(2), Vector::Ones(2)), 0.1, k);
        CHECK(est.value == doctest::Approx(matrix_norm(B, k)));
    }
    const auto zero = linear_poly_system(Matrix::Identity(1, 1), {Polynomial{}});
    CHECK(estimate_lipschitz(zero, ball, 0.1, NormKind::Inf).value == 0.0);
    CHECK_THROWS_AS((void)estimate_lipschitz(si_system(), Region::simplex_gamma(0.2), 0.0, NormKind::Inf),
                    StructureError);
}

TEST_CASE("log-norm margin estimates") {
    const auto exm = exm_system();
    const auto hl = Region::half_line(1, -0.3);
    CHECK(estimate_m(exm, hl, 0.1, NormKind::Inf).value == doctest::Approx(0.2));
    CHECK(estimate_m(exm, hl, 0.1, NormKind::Inf).exact);

    const auto si = si_system();
    CHECK(estimate_m(si, Region::simplex_gamma(0.2), 0.0, NormKind::Inf).value == doctest::Approx(0.2));
    CHECK(estimate_m(si, Region::simplex_gamma(0.2), 0.02, NormKind::Inf).value == doctest::Approx(0.16));

    // Sampling approaches the exact margin from above on the neighbourhood.
    SampleOptions sampled;
    sampled.closed_form = false;
    sampled.samples = 4000;
    const auto s = estimate_m(si, Region::simplex_gamma(0.2), 0.02, NormKind::Inf, sampled);
    CHECK(s.value >= 0.16 - 1e-12);
    CHECK(s.value <= 0.17);

    try {
        (void)estimate_m(si, Region::simplex_gamma(0.0), 0.0, NormKind::Inf);
        FAIL("expected the hypothesis to fail on Gamma_0");
    } catch (const HypothesisViolated& e) {
        CHECK(e.value() == doctest::Approx(0.0));
        CHECK(e.witness().sum() == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS((void)estimate_m(exm, Region::half_line(1, -0.5), 0.1, NormKind::Inf), HypothesisViolated);
}

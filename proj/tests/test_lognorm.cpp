#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "shadowlab/errors.hpp"
#include "shadowlab/lognorm.hpp"

using namespace shadowlab;

TEST_CASE("mu of the zero matrix is zero in every norm") {
    for (Eigen::Index n = 1; n <= 4; ++n) {
        for (NormKind k : kAllNorms) {
            CHECK(mu_closed(Matrix::Zero(n, n), k) == 0.0);
            CHECK(mu_limit(Matrix::Zero(n, n), k) == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("scalar mu equals the scalar") {
    const Matrix a = Matrix::Constant(1, 1, -3.0);
    for (NormKind k : kAllNorms) {
        CHECK(mu_closed(a, k) == -3.0);
        CHECK(std::abs(mu_limit(a, k, 1e-6) + 3.0) <= 1e-5);
    }
}

TEST_CASE("SI Jacobian at S=0.5, I=0.3 has mu_inf = S - 1 + I") {
    Matrix a(2, 2);
    a << -1.3, -0.5, 0.3, -0.5;
    CHECK(mu_closed(a, NormKind::Inf) == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(std::abs(mu_limit(a, NormKind::Inf) - (-0.2)) <= 1e-5);
}

TEST_CASE("mu_two of a diagonal matrix is its largest entry") {
    Matrix a = Matrix::Zero(2, 2);
    a.diagonal() << -1.0, -2.0;
    CHECK(mu_closed(a, NormKind::Two) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS((void)mu_closed(Matrix::Zero(2, 3), NormKind::Inf), DimensionError);
    CHECK_THROWS_AS((void)mu_limit(Matrix::Zero(2, 2), NormKind::Inf, 0.0), ArgumentError);
    CHECK_THROWS_AS((void)mu_limit(Matrix::Zero(2, 2), NormKind::Inf, -1e-6), ArgumentError);
    CHECK_THROWS_AS((void)mu_integral_check([](double) { return Matrix::Zero(2, 2); }, NormKind::Inf, 1),
                    ArgumentError);
    CHECK_THROWS_AS(MatrixPath({0.0, 1.0}, {Matrix::Zero(2, 2), Matrix::Zero(3, 3)}), DimensionError);
    CHECK_THROWS_AS(MatrixPath({0.0, 0.5}, {Matrix::Zero(2, 2), Matrix::Zero(2, 2)}), ArgumentError);
}

TEST_CASE("closed forms agree with the reference implementations and the limit quotient") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 1 + trial % 5;
        const Matrix a = oracle::random_matrix(rng, n);
        for (NormKind k : kAllNorms) {
            const double closed = mu_closed(a, k);
            CHECK(closed == doctest::Approx(oracle::mu(a, k)).epsilon(1e-12).scale(1.0));
            CHECK(std::abs(closed - mu_limit(a, k, 1e-6)) <= 1e-4);
        }
    }
}

TEST_CASE("algebraic properties hold on random matrices") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> alpha(0.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 1 + trial % 5;
        const Matrix a = oracle::random_matrix(rng, n), b = oracle::random_matrix(rng, n);
        const double al = alpha(rng);
        for (NormKind k : kAllNorms) {
            const double ma = mu_closed(a, k), mb = mu_closed(b, k);
            CHECK(std::abs(mu_closed(al * a, k) - al * ma) <= 1e-12 * (1.0 + std::abs(al * ma)));
            CHECK(std::abs(ma) <= matrix_norm(a, k) + 1e-12);
            CHECK(mu_closed(a + b, k) <= ma + mb + 1e-12);
            CHECK(std::abs(ma - mb) <= matrix_norm(a - b, k) + 1e-12);
        }
    }
}

TEST_CASE("integral check on a constant path is exact") {
    Matrix a(2, 2);
    a << -1.0, 0.4, -0.2, 0.3;
    const MatrixPath path({0.0, 1.0}, {a, a});
    for (NormKind k : kAllNorms) {
        const auto r = mu_integral_check(path, k, 17);
        CHECK(r.lhs == doctest::Approx(mu_closed(a, k)).epsilon(1e-13));
        CHECK(r.rhs == doctest::Approx(mu_closed(a, k)).epsilon(1e-13));
    }
}

TEST_CASE("integral check on diag(-1, s) gives one half on both sides") {
    auto m = [](double s) {
        Matrix d = Matrix::Zero(2, 2);
        d.diagonal() << -1.0, s;
        return d;
    };
    // Knots at every quadrature node keep the interpolant exact.
    std::vector<double> s;
    std::vector<Matrix> ms;
    for (int i = 0; i <= 100; ++i) {
        s.push_back(i / 100.0);
        ms.push_back(m(i / 100.0));
    }
    const auto r = mu_integral_check(MatrixPath(s, ms), NormKind::Inf, 101);
    CHECK(r.lhs == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("integral lemma on a rotating non-commuting family (two-norm)") {
    auto m = [](double s) {
        const double c = std::cos(3.0 * s), sn = std::sin(3.0 * s);
        Matrix r(2, 2), d(2, 2);
        r << c, -sn, sn, c;
        d << -1.0, 2.0, 0.0, 0.5;
        return Matrix(r * d * r.transpose());
    };
    const auto r = mu_integral_check(m, NormKind::Two, 1000);
    CHECK(r.lhs <= r.rhs + 1e-12);
    const double rhs_ref = oracle::simpson([&](double s) { return oracle::mu_two_general(m(s)); }, 0.0, 1.0);
    CHECK(r.rhs == doctest::Approx(rhs_ref).epsilon(1e-5));
}

TEST_CASE("integral lemma on random polynomial paths") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + trial % 4;
        const Matrix c0 = oracle::random_matrix(rng, n), c1 = oracle::random_matrix(rng, n),
                     c2 = oracle::random_matrix(rng, n), c3 = oracle::random_matrix(rng, n);
        auto path = [&](double s) { return Matrix(c0 + s * c1 + s * s * c2 + s * s * s * c3); };
        for (NormKind k : kAllNorms) {
            const auto r = mu_integral_check(path, k, 200);
            CHECK(r.lhs <= r.rhs + 1e-8);
        }
    }
}

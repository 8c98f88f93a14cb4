#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "shadowlab/errors.hpp"
#include "shadowlab/region.hpp"
#include "shadowlab/systems.hpp"

using namespace shadowlab;

namespace {

Matrix central_jacobian(const OdeSystem& sys, const Vector& x) {
    const double h = 1e-6;
    Matrix j(sys.n, sys.n);
    for (Eigen::Index c = 0; c < sys.n; ++c) {
        Vector xp = x, xm = x;
        xp(c) += h;
        xm(c) -= h;
        j.col(c) = (sys.g(0.0, xp) - sys.g(0.0, xm)) / (2.0 * h);
    }
    return j;
}

void check_jacobian(const OdeSystem& sys, double spread, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-spread, spread);
    for (int i = 0; i < 100; ++i) {
        Vector x(sys.n);
        for (Eigen::Index c = 0; c < sys.n; ++c) x(c) = u(rng);
        const Matrix fd = central_jacobian(sys, x);
        const Matrix an = sys.gx(0.0, x);
        CHECK((fd - an).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, an.cwiseAbs().maxCoeff()));
        if (sys.split) {
            const Matrix split = sys.split->a(0.0) + sys.split->fx(0.0, x);
            CHECK((split - an).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, an.cwiseAbs().maxCoeff()));
            const Vector gsplit = sys.split->a(0.0) * x + sys.split->f(0.0, x);
            CHECK((gsplit - sys.g(0.0, x)).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, x.squaredNorm()));
        }
    }
}

}  // namespace

TEST_CASE("Jacobians agree with central differences") {
    check_jacobian(exm_system(), 3.0, 1);
    check_jacobian(si_system(), 1.0, 2);
    check_jacobian(logistic_system(-1.0, 1.0), 2.0, 3);
    Matrix a(2, 2);
    a << -1.0, 0.3, 0.0, -2.0;
    Polynomial p1{{1.0, {2, 0}}, {-0.5, {1, 1}}};
    Polynomial p2{{0.25, {0, 3}}};
    check_jacobian(linear_poly_system(a, {p1, p2}), 1.5, 4);
    check_jacobian(linear_sin_system(a, 0.2), 4.0, 5);
}

TEST_CASE("polynomial evaluation and gradient") {
    Polynomial p{{2.0, {1, 2}}, {-1.0, {0, 0}}};
    Vector x(2);
    x << 3.0, -2.0;
    CHECK(eval_polynomial(p, x) == doctest::Approx(2.0 * 3.0 * 4.0 - 1.0));
    const Vector g = polynomial_gradient(p, x);
    CHECK(g(0) == doctest::Approx(8.0));
    CHECK(g(1) == doctest::Approx(2.0 * 3.0 * 2.0 * -2.0));
}

TEST_CASE("exm integration matches the closed form") {
    const auto sys = exm_system();
    for (double c : {-0.4, 0.0, 0.3, 1.0, 2.5}) {
        const auto grid = uniform_grid(0.0, 5.0, 51);
        const auto traj = integrate_on(sys, Vector::Constant(1, c), grid);
        REQUIRE_FALSE(traj.blew_up);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(traj.x[i](0) == doctest::Approx(exm_exact(c, grid[i])).epsilon(1e-8));
        }
    }
    CHECK(exm_exact(-0.5, 100.0) == -0.5);
}

TEST_CASE("exm from x0 = -1 blows up near t = 2") {
    const auto traj = integrate(exm_system(), Vector::Constant(1, -1.0), 3.0);
    CHECK(traj.blew_up);
    CHECK(traj.blowup_time == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(traj.blowup_time < 2.0);
    CHECK_THROWS_AS((void)exm_exact(-1.0, 2.5), DomainError);
}

TEST_CASE("SI equilibrium and conservation of S + I") {
    const auto sys = si_system();
    Vector e(2);
    e << 1.0, 0.0;
    CHECK(sys.g(0.0, e).cwiseAbs().maxCoeff() == 0.0);
    Vector x0(2);
    x0 << 0.3, 0.2;
    const auto grid = uniform_grid(0.0, 3.0, 31);
    const auto traj = integrate_on(sys, x0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        // (S + I)' = 1 - (S + I)
        const double total = 1.0 - 0.5 * std::exp(-grid[i]);
        CHECK(traj.x[i].sum() == doctest::Approx(total).epsilon(1e-9));
    }
}

TEST_CASE("registry") {
    CHECK(registry("exm").tag == SystemTag::Exm);
    CHECK(registry("si").n == 2);
    RegistryParams lp;
    lp.scalars = {{"a", -1.0}, {"b", 2.0}};
    const auto logi = registry("logistic", lp);
    CHECK(logi.g(0.0, Vector::Constant(1, 1.0))(0) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)registry("logistic"), RegistryError);
    CHECK_THROWS_AS((void)registry("linear_poly"), RegistryError);
    CHECK_THROWS_AS((void)registry("lorenz"), RegistryError);
    RegistryParams sp;
    sp.a = Matrix::Constant(1, 1, -1.0);
    sp.scalars = {{"a", 0.1}};
    CHECK(registry("linear_sin", sp).split.has_value());
}

TEST_CASE("argument validation") {
    const auto sys = exm_system();
    CHECK_THROWS_AS((void)integrate(sys, Vector::Zero(1), 0.0), ArgumentError);
    CHECK_THROWS_AS((void)integrate(sys, Vector::Zero(2), 1.0), DimensionError);
    const std::vector<double> bad{0.5, 1.0};
    CHECK_THROWS_AS((void)integrate_on(sys, Vector::Zero(1), bad), ArgumentError);
    CHECK_THROWS_AS((void)logistic_system(0.0, 1.0), ArgumentError);
    CHECK_THROWS_AS((void)uniform_grid(0.0, 1.0, 1), ArgumentError);
}

TEST_CASE("trajectory CSV") {
    const auto traj = integrate_on(exm_system(), Vector::Zero(1), uniform_grid(0.0, 1.0, 3));
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    const std::string s = os.str();
    CHECK(s.rfind("t,x1\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}

TEST_CASE("Gamma_c membership") {
    const auto g = Region::simplex_gamma(0.2);
    Vector in(2), edge(2), out(2), neg(2);
    in << 0.3, 0.3;
    edge << 0.4, 0.4;
    out << 0.5, 0.4;
    neg << -0.1, 0.5;
    CHECK(g.contains(in));
    CHECK(g.contains(edge));
    CHECK_FALSE(g.contains(out));
    CHECK_FALSE(g.contains(neg));
}

#include <doctest.h>

#include <sstream>

#include "shadowlab/config.hpp"
#include "shadowlab/errors.hpp"

using namespace shadowlab;

namespace {

Config from(const std::string& text) {
    std::istringstream in(text);
    return Config::parse(in, "test.ini");
}

}  // namespace

TEST_CASE("sections, keys and comments") {
    const auto cfg = from(
        "# leading comment\n"
        "; another\n"
        "[system]\n"
        "name = exm   # trailing\n"
        "\n"
        "[grid]\n"
        "t1 = 5\n"
        "points = 11\n");
    CHECK(cfg.get_string("system", "name") == "exm");
    CHECK(cfg.get_double("grid", "t1") == 5.0);
    CHECK(cfg.get_int("grid", "points", 0) == 11);
    CHECK(cfg.get_double("grid", "t0", 0.0) == 0.0);
    CHECK(cfg.has_section("grid"));
    CHECK_FALSE(cfg.has_section("pseudo"));
    CHECK(cfg.find("system", "name")->line == 4);
    const auto grid = grid_from_config(cfg);
    CHECK(grid.size() == 11);
    CHECK(grid.back() == 5.0);
}

TEST_CASE("malformed files name the offending line") {
    CHECK_THROWS_WITH_AS(from("[a]\nx = 1\nx = 2\n"), doctest::Contains("test.ini:3:"), ConfigError);
    CHECK_THROWS_WITH_AS(from("x = 1\n"), doctest::Contains("test.ini:1:"), ConfigError);
    CHECK_THROWS_WITH_AS(from("[a]\n[a]\n"), doctest::Contains("test.ini:2:"), ConfigError);
    CHECK_THROWS_WITH_AS(from("[a]\njunk\n"), doctest::Contains("test.ini:2:"), ConfigError);
    const auto cfg = from("[grid]\n\nt1 = abc\n");
    CHECK_THROWS_WITH_AS((void)cfg.get_double("grid", "t1"), doctest::Contains("test.ini:3:"), ConfigError);
    CHECK_THROWS_AS((void)cfg.get_string("grid", "missing"), ConfigError);
    CHECK_THROWS_WITH_AS((void)from("[grid]\npoints = 2.5\n").get_int("grid", "points", 1),
                         doctest::Contains("integer"), ConfigError);
}

TEST_CASE("matrix, vector and polynomial syntax") {
    const Matrix m = parse_matrix("1, 2; 3, 4");
    CHECK(m(1, 0) == 3.0);
    CHECK(m.rows() == 2);
    CHECK_THROWS_AS((void)parse_matrix("1, 2; 3"), ArgumentError);
    const Vector v = parse_vector("0.5 -1 2");
    CHECK(v.size() == 3);
    CHECK(v(1) == -1.0);
    CHECK(parse_vector("1, 2").size() == 2);
    const auto p = parse_polynomial("0.5 [2 0]; -1 [1 1]", 2);
    REQUIRE(p.size() == 2);
    CHECK(p[1].coef == -1.0);
    CHECK(p[0].exponents == std::vector<int>{2, 0});
    CHECK_THROWS_AS((void)parse_polynomial("1 [1]", 2), ArgumentError);
    CHECK(parse_polynomial("", 2).empty());
}

TEST_CASE("systems, regions and dichotomies from config") {
    const auto cfg = from(
        "[system]\n"
        "name = linear_sin\n"
        "A = -1, 0; 0, 1\n"
        "a = 0.1\n"
        "[norm]\n"
        "kind = two\n"
        "[region]\n"
        "shape = ball\n"
        "radius = 2\n"
        "[constants]\n"
        "N = 1\n"
        "lambda = 1\n"
        "P = 1, 0; 0, 0\n"
        "[pseudo]\n"
        "seed = 7\n");
    const auto sys = system_from_config(cfg);
    CHECK(sys.n == 2);
    const NormKind k = norm_from_config(cfg);
    CHECK(k == NormKind::Two);
    const auto H = region_from_config(cfg, sys.n, k);
    CHECK(H.shape() == RegionShape::Ball);
    CHECK(H.radius() == 2.0);
    const auto d = dichotomy_from_config(cfg, sys, k);
    CHECK(d.kind == DichotomyKind::Dichotomy);
    CHECK(d.P(3.0)(0, 0) == 1.0);
    CHECK(seed_from_config(cfg) == 7);

    const auto spectral = from("[system]\nname = linear_sin\nA = -2, 1; 0, 1\na = 0\n[constants]\nP = spectral\n");
    const auto s2 = system_from_config(spectral);
    CHECK(dichotomy_from_config(spectral, s2, NormKind::Inf).lambda == doctest::Approx(1.0));
}

TEST_CASE("linear_poly components") {
    const auto cfg = from("[system]\nname = linear_poly\nA = -1\nf1 = 0.1 [1]\n");
    const auto sys = system_from_config(cfg);
    CHECK(sys.g(0.0, Vector::Ones(1))(0) == doctest::Approx(-0.9));
}

TEST_CASE("bad values point at the key") {
    CHECK_THROWS_WITH_AS((void)system_from_config(from("[system]\nname = lorenz\n")),
                         doctest::Contains("test.ini:2:"), ConfigError);
    CHECK_THROWS_WITH_AS((void)system_from_config(from("[system]\nname = exm\nA = 1, 2\n")),
                         doctest::Contains("test.ini:3:"), ConfigError);
    const auto cfg = from("[system]\nname = exm\n[region]\nshape = blob\n");
    CHECK_THROWS_WITH_AS((void)region_from_config(cfg, 1, NormKind::Inf), doctest::Contains("test.ini:4:"),
                         ConfigError);
    CHECK_THROWS_AS((void)norm_from_config(from("[norm]\nkind = five\n")), ConfigError);
}

TEST_CASE("pseudosolutions from config") {
    const auto cfg = from(
        "[system]\nname = exm\n"
        "[region]\nshape = half_line\na = -0.3\n"
        "[pseudo]\nkind = perturbed\nx0 = 0.1\nT = 1\namplitude = 0.01\n");
    const auto sys = system_from_config(cfg);
    const auto H = region_from_config(cfg, 1, NormKind::Inf);
    const auto y = pseudo_from_config(cfg, sys, H, NormKind::Inf, 3);
    CHECK(y.sigma <= 0.01);
    CHECK(*y.seed == 3);
    const auto bad = from("[system]\nname = exm\n[pseudo]\nkind = weird\n");
    CHECK_THROWS_AS((void)pseudo_from_config(bad, sys, H, NormKind::Inf, 1), ConfigError);
}

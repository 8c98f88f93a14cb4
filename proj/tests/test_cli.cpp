#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shadowlab/cli.hpp"

using namespace shadowlab;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "shadowlab_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string write(const std::string& name, const std::string& text) {
    const auto p = scratch(name);
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST_CASE("lognorm prints all three norms") {
    const auto file = write("zero.csv", "0,0\n0,0\n");
    auto r = run({"lognorm", file});
    CHECK(r.code == 0);
    CHECK(r.out == "inf 0\none 0\ntwo 0\n");
    const auto si = write("si.csv", "-1.3,-0.5\n0.3,-0.5\n");
    r = run({"lognorm", si, "--norm", "inf"});
    CHECK(r.code == 0);
    CHECK(std::stod(r.out.substr(4)) == doctest::Approx(-0.2));
    r = run({"lognorm", si, "--norm", "inf", "--limit"});
    CHECK(r.code == 0);
}

TEST_CASE("certify emits JSON") {
    auto r = run({"--no-timestamp", "certify", "--route", "lognorm", "--m", "0.2", "--delta", "0.1"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["eps0"].get<double>() == doctest::Approx(0.02));
    CHECK(j["kappa"].get<double>() == doctest::Approx(5.0));
    CHECK_FALSE(j.contains("generated"));
    r = run({"certify", "--route", "t1", "--N", "1", "--lambda", "1", "--L", "0.5", "--delta", "1"});
    CHECK(r.code == 1);
    CHECK(r.err.find("not applicable") != std::string::npos);
    r = run({"certify", "--route", "gen", "--N", "1", "--lambda", "1", "--growth", "0,2", "--rho", "0.3", "--kind",
             "contraction"});
    CHECK(r.code == 0);
    r = run({"certify", "--route", "t1", "--N", "1"});
    CHECK(r.code == 2);
}

TEST_CASE("certify estimates missing constants from a config") {
    const auto cfg = write("si.ini",
                           "[system]\nname = si\n[region]\nshape = gamma\nc = 0.2\n[constants]\ndelta = 0.02\n");
    const auto r = run({"certify", "--route", "lognorm", cfg});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["kappa"].get<double>() == doctest::Approx(1.0 / 0.16));
    CHECK(j["status"] == "exact");
}

TEST_CASE("shadow and relocate from configs") {
    const auto ln = write("ln.ini",
                          "[system]\nname = exm\n[region]\nshape = half_line\na = -0.3\n[constants]\ndelta = 0.1\n"
                          "[pseudo]\nkind = perturbed\nx0 = 0.2\nT = 2\namplitude = 0.01\n");
    const auto out = scratch("shadow_out");
    auto r = run({"shadow", "--route", "lognorm", ln, "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(std::filesystem::exists(out / "shadow.csv"));
    CHECK(nlohmann::json::parse(r.out)["passed"] == true);

    const auto di = write("di.ini",
                          "[system]\nname = linear_sin\nA = -1, 0; 0, 1\na = 0.1\n[region]\nshape = ball\nradius = 1\n"
                          "[constants]\nN = 1\nlambda = 1\nP = 1, 0; 0, 0\nL = 0.1\ndelta = 1\n"
                          "[pseudo]\nkind = oscillating\nT = 5\npoints = 501\nsigma = 0.01\n");
    r = run({"shadow", "--route", "dichotomy", di});
    CHECK(r.code == 0);

    const auto rel = write("rel.ini",
                           "[system]\nname = linear_poly\nA = -1\nf1 = 0.1 [1]\n[constants]\nN = 1\nlambda = 1\n"
                           "kind = contraction\nL = 0.1\nrho = 1\n"
                           "[pseudo]\nkind = oscillating\ncenter = 0.2\nT = 5\npoints = 501\nsigma = 0.3\n");
    r = run({"relocate", rel});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["within_ball"] == true);
}

TEST_CASE("verify-dichotomy exit codes") {
    const auto good = write("vd.ini",
                            "[system]\nname = linear_sin\nA = -1, 0; 0, 1\na = 0\n[constants]\nN = 1\nlambda = 1\n"
                            "P = 1, 0; 0, 0\n[grid]\nt1 = 3\npoints = 7\n");
    CHECK(run({"verify-dichotomy", good}).code == 0);
    const auto bad = write("vd_bad.ini",
                           "[system]\nname = linear_sin\nA = -1, 0; 0, 1\na = 0\n[constants]\nN = 0.5\nlambda = 1\n"
                           "P = 1, 0; 0, 0\n[grid]\nt1 = 3\npoints = 7\n");
    CHECK(run({"verify-dichotomy", bad}).code == 1);
}

TEST_CASE("replicate examples") {
    auto r = run({"replicate", "exm-counter", "--delta", "0.05", "--kappa", "4", "--T", "200"});
    CHECK(r.code == 0);
    CHECK(r.out.find("failure_certified = true") != std::string::npos);
    r = run({"replicate", "exm", "--rho", "0.5", "--runs", "1"});
    CHECK(r.code == 1);
    const auto dir = scratch("rep");
    r = run({"--seed", "5", "replicate", "revisited", "--runs", "2", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(std::filesystem::exists(dir / "report.json"));
    r = run({"replicate", "lorenz"});
    CHECK(r.code == 2);
}

TEST_CASE("malformed configs exit with 2 and a line number") {
    const auto cfg = write("bad.ini", "[system]\nname = exm\nname = si\n");
    const auto r = run({"shadow", "--route", "lognorm", cfg});
    CHECK(r.code == 2);
    CHECK(r.err.find("bad.ini:3:") != std::string::npos);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({}).code == 2);
}

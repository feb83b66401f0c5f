#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phibvp/cli.hpp"
#include "phibvp/problem_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace phibvp;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fixture(const std::string& name)
{
    const char* dir = std::getenv("PHIBVP_FIXTURES");
    return (fs::path(dir ? dir : "tests/fixtures") / name).string();
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("phibvp_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "phi-bvp");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kMinimal = R"({
  "interval": [0, 1], "grid_size": 101, "phi": "power:1",
  "m": {"expr": {"constant": 1}}, "n": {"expr": {"constant": 1}},
  "lambda": 0.01, "mu": 1, "f": "power:0.5", "g": "power:2"
})";

// replaces one top-level key of the minimal document
std::string with(const std::string& key, const json& value)
{
    json doc = json::parse(kMinimal);
    doc[key] = value;
    return doc.dump();
}

std::string error_of(const std::string& text)
{
    try {
        parse_problem_text(text, "doc");
    } catch (const ProblemFileError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("minimal problem file")
{
    const ProblemFile pf = parse_problem_text(kMinimal);
    CHECK(pf.spec.m.size() == 101);
    CHECK(pf.spec.lambda == 0.01);
    CHECK(pf.spec.mu == 1.0);
    CHECK(pf.spec.f(4.0) == doctest::Approx(2.0));
    CHECK(pf.spec.g(3.0) == doctest::Approx(9.0));
    CHECK(pf.spec.phi.forward(2.5) == 2.5);
    CHECK_FALSE(pf.h.has_value());
    CHECK_FALSE(pf.spec.F.has_value());

    const ProblemFile fine = parse_problem_text(kMinimal, "doc", 513);
    CHECK(fine.spec.m.size() == 513);
    CHECK(parse_problem(fixture("reference.json")).spec.G2.has_value());
}

TEST_CASE("invalid values name the constraint")
{
    CHECK(error_of(with("mu", -1.0)).find("mu > 0") != std::string::npos);
    CHECK(error_of(with("lambda", 0.0)).find("lambda > 0") != std::string::npos);
    CHECK(error_of(with("m", -1.0)).find("m >= 0") != std::string::npos);
    CHECK(error_of(with("grid_size", 2)).find("grid_size") != std::string::npos);
    CHECK(error_of(with("interval", json::array({1, 0}))).find("a < b") != std::string::npos);
    // f = t^2 is not above t^{1/2} near zero
    json doc = json::parse(with("f", "power:2"));
    doc["F"] = {{"c0", 1}, {"t0", 1}, {"q", 0.5}};
    CHECK(error_of(doc.dump()).find("(F)") != std::string::npos);
}

TEST_CASE("strict keys and parse diagnostics")
{
    const std::string unknown = error_of(with("lamda", 1.0));
    CHECK(unknown.find("'lamda'") != std::string::npos);
    CHECK(unknown.find("unknown key") != std::string::npos);

    const std::string nested = error_of(with("m", {{"expr", {{"power", {{"coef", 1}, {"exp", 2}}}}}}));
    CHECK(nested.find("m.expr.power.exp") != std::string::npos);

    const std::string missing = error_of(R"({"interval": [0, 1], "grid_size": 11})");
    CHECK(missing.find("'phi'") != std::string::npos);
    CHECK(missing.find("missing") != std::string::npos);

    const std::string syntax = error_of("{\n  \"interval\": [0, 1],\n  \"grid_size\": ,\n}");
    CHECK(syntax.find("line 3") != std::string::npos);

    CHECK(error_of(with("phi", "cubic")).find("unknown phi catalog entry") != std::string::npos);
    CHECK(error_of(with("f", "power:x")).find("'f'") != std::string::npos);
    CHECK(error_of(with("g", "square")).find("'g'") != std::string::npos);
    CHECK_THROWS_AS(parse_problem("/nonexistent/problem.json"), ProblemFileError);
}

TEST_CASE("weight descriptors")
{
    SUBCASE("indicator feeds the support edges")
    {
        json doc = json::parse(with("grid_size", 1025));
        doc["n"] = {{"expr", {{"indicator", {0.25, 0.5}}}}};
        const auto s = support_data(parse_problem_text(doc.dump()).spec.n);
        CHECK(std::abs(s.alpha_h - 0.25) < 1e-6);
        CHECK(std::abs(s.beta_h - 0.5) < 1e-6);
    }
    SUBCASE("power and product")
    {
        json doc = json::parse(kMinimal);
        doc["interval"] = {1, 3};
        doc["m"] = {{"expr", {{"product", {{{"constant", 2}}, {{"power", {{"coef", 3}, {"exponent", 2}}}}}}}}};
        const auto m = parse_problem_text(doc.dump()).spec.m;
        // 2 * 3 (x - 1)^2 at x = 2
        CHECK(m(2.0) == doctest::Approx(6.0));
        CHECK(m[0] == 0.0);
    }
    SUBCASE("node tables are interpolated")
    {
        const auto m = parse_problem_text(with("m", {{"nodes", {0, 0.5, 1}}, {"values", {0, 2, 0}}})).spec.m;
        CHECK(m(0.25) == doctest::Approx(1.0));
        CHECK(m(0.5) == doctest::Approx(2.0));
        CHECK(error_of(with("m", {{"nodes", {0.1, 1}}, {"values", {1, 1}}})).find("cover") != std::string::npos);
        CHECK(error_of(with("m", {{"nodes", {0, 1}}, {"values", {1}}})).find("same length") != std::string::npos);
    }
    SUBCASE("table nonlinearity")
    {
        const auto pf = parse_problem_text(with("f", {{"table", {{"t", {0, 1, 2}}, {"values", {0, 1, 1.5}}}}}));
        CHECK(pf.spec.f(0.5) == doctest::Approx(0.5));
        CHECK(pf.spec.f(1.5) == doctest::Approx(1.25));
    }
}

TEST_CASE("exit codes")
{
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"solve-linear"}).code == kExitUsage);
    CHECK(run({"indices"}).code == kExitUsage);
    CHECK(run({"indices", "--phi", "power:2", "--all"}).code == kExitUsage);
    CHECK(run({"verify-bounds", "--cases", "zero"}).code == kExitUsage);
    const Run help = run({"--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("solve-linear") != std::string::npos);

    const auto dir = scratch_dir("codes");
    const Run missing = run({"solve-linear", "/nonexistent/problem.json", "--out-dir", dir.string()});
    CHECK(missing.code == kExitDomain);
    CHECK(missing.err.find("cannot open") != std::string::npos);
    CHECK(run({"indices", "--phi", "cubic", "--out-dir", dir.string()}).code == kExitDomain);
    std::ofstream(dir / "bare.json") << kMinimal;
    const Run bare = run({"solve-nonlinear", (dir / "bare.json").string(), "--out-dir", dir.string()});
    CHECK(bare.code == kExitDomain);
    CHECK(bare.err.find("F and G1") != std::string::npos);
    // lambda far above lambda0 for the reference problem
    json ref = json::parse(slurp(fixture("reference.json")));
    ref["lambda"] = 1e6;
    std::ofstream(dir / "big.json") << ref.dump();
    const Run big = run({"solve-nonlinear", (dir / "big.json").string(), "--out-dir", dir.string()});
    CHECK(big.code == kExitDomain);
    CHECK(big.err.find("lambda0") != std::string::npos);
}

TEST_CASE("solve-linear writes the profile and report")
{
    const auto dir = scratch_dir("linear");
    const Run r = run({"solve-linear", fixture("linear_power2.json"), "--out-dir", dir.string()});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    CHECK(r.out.empty());

    // -(|u'| u')' = 1 on (0,1): u' = sign(1/2 - x) |1/2 - x|^{1/2}, peak at 1/2
    const double peak = 2.0 / 3.0 * std::pow(0.5, 1.5);
    std::ifstream csv(dir / "solution.csv");
    const GridFunction u = read_csv(csv, "u");
    CHECK(u.size() == 1025);
    CHECK(sup_norm(u) == doctest::Approx(peak).epsilon(1e-6));
    std::ifstream csv2(dir / "solution.csv");
    const GridFunction du = read_csv(csv2, "du");
    CHECK(du[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-8));

    const json rep = json::parse(slurp(dir / "report.json"));
    CHECK(rep["c_star"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rep["residual"].get<double>() < 1e-9);
    for (const char* k : {"sandwich_ok", "cone_ok", "min_bracket_ok", "c_estimate_ok"})
        CHECK_MESSAGE(rep["bounds"][k].get<bool>(), k);
}

TEST_CASE("solve-nonlinear on the reference problem")
{
    const auto dir = scratch_dir("nonlinear");
    const Run r = run({"solve-nonlinear", fixture("reference.json"), "--out-dir", dir.string()});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    const json rep = json::parse(slurp(dir / "report.json"));
    CHECK(rep["lambda0"].get<double>() > 0.01);
    CHECK(rep["supersolution"]["verified"].get<bool>());
    CHECK(rep["subsolution"]["verified"].get<bool>());
    CHECK(rep["between"]["converged"].get<bool>());
    CHECK(rep["between"]["ordered"].get<bool>());
    CHECK(rep["between"]["in_cone"].get<bool>());
    CHECK(rep["shooting"].size() == 2);
    std::ifstream prof(dir / "profiles.csv");
    const GridFunction w = read_csv(prof, "w");
    CHECK(w.size() == 257);
    CHECK(fs::exists(dir / "shooting.csv"));
}

TEST_CASE("sweep on the reference problem")
{
    const auto dir = scratch_dir("sweep");
    const Run r = run({"sweep", fixture("reference.json"), "--out-dir", dir.string(), "--lambda-min", "1e-3",
                       "--lambda-max", "30", "--lambda-steps", "6"});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    const json rep = json::parse(slurp(dir / "report.json"));
    REQUIRE(rep["lambda_star_estimate"].is_number());
    CHECK(rep["lambda_star_estimate"].get<double>() > 10.0);
    CHECK(rep["lambda_star_estimate"].get<double>() < 13.0);
    CHECK(rep["lambda1"].get<double>() == doctest::Approx(0.375).epsilon(1e-6));
    CHECK(rep["rho"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));

    std::ifstream csv(dir / "diagram.csv");
    std::string header, line;
    std::getline(csv, header);
    CHECK(header == "lambda,branch_index,sup_norm,initial_slope,in_cone");
    int at_smallest = 0;
    while (std::getline(csv, line))
        at_smallest += line.rfind("0.001,", 0) == 0 ? 1 : 0;
    CHECK(at_smallest == 2);
    CHECK(rep["points"][0]["solutions"].get<int>() == 2);
    CHECK(rep["points"][5]["solutions"].get<int>() == 0);
}

TEST_CASE("indices report")
{
    const auto dir = scratch_dir("indices");
    const Run r = run({"indices", "--phi", "power:2", "--q", "1", "--r1", "3", "--r2", "3", "--out-dir",
                       dir.string()});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    const json rep = json::parse(slurp(dir / "indices.json"));
    REQUIRE(rep["entries"].size() == 1);
    const json& e = rep["entries"][0];
    CHECK(e["alpha_hat"].get<double>() == doctest::Approx(2.0).epsilon(0.01));
    CHECK(e["beta_hat"].get<double>() == doctest::Approx(2.0).epsilon(0.01));
    CHECK(e["delta2"]["holds"].get<bool>());
    CHECK(e["phi_cond"].get<bool>());
    CHECK(e["duality"]["ok"].get<bool>());
    CHECK(e["advisor"].size() == 3);
    CHECK(e["advisor"][0]["verdict"] == "HOLDS");

    REQUIRE(run({"indices", "--all", "--out-dir", dir.string()}).code == kExitOk);
    const json all = json::parse(slurp(dir / "indices.json"));
    CHECK(all["entries"].size() == catalog_descriptors().size());
}

TEST_CASE("verify-bounds is deterministic")
{
    const auto a = scratch_dir("bounds_a"), b = scratch_dir("bounds_b");
    REQUIRE(run({"verify-bounds", "--seed", "7", "--cases", "12", "--out-dir", a.string()}).code == kExitOk);
    REQUIRE(run({"verify-bounds", "--seed", "7", "--cases", "12", "--out-dir", b.string()}).code == kExitOk);
    const std::string ra = slurp(a / "bounds_report.json");
    CHECK(ra == slurp(b / "bounds_report.json"));
    const json rep = json::parse(ra);
    CHECK(rep["passed"].get<int>() == 12);
    CHECK(ra.find("time") == std::string::npos);

    REQUIRE(run({"verify-bounds", "--seed", "8", "--cases", "12", "--out-dir", b.string()}).code == kExitOk);
    CHECK(ra != slurp(b / "bounds_report.json"));
}

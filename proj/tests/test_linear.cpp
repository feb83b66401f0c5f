#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phibvp/linear_solver.hpp"

#include <cmath>
#include <random>

using namespace phibvp;

namespace {

// closed form for phi = power(r), h = 1 on (0, 1): u'(x) = sign(1/2 - x) |1/2 - x|^{1/r}
double power_oracle_u(double r, double x)
{
    const double e = 1.0 / r + 1.0;
    const double left = std::pow(0.5, e) / e;
    const double d = std::abs(0.5 - x);
    return left - std::pow(d, e) / e;
}

GridFunction indicator(const GridPtr& g, double l, double r)
{
    return GridFunction::sample(g, [=](double x) { return (x > l && x < r) ? 1.0 : 0.0; });
}

} // namespace

TEST_CASE("zero forcing gives the zero solution")
{
    auto g = Grid::uniform(0.0, 1.0, 65);
    auto s = solve_linear(make_power(2.0), GridFunction::constant(g, 0.0));
    CHECK(s.c_star == 0.0);
    CHECK(sup_norm(s.u) == 0.0);
}

TEST_CASE("identity phi and unit forcing")
{
    auto g = Grid::uniform(0.0, 1.0, 257);
    auto s = solve_linear(make_power(1.0), GridFunction::constant(g, 1.0));
    CHECK(s.c_star == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t i = 0; i < g->size(); ++i) {
        const double x = (*g)[i];
        CHECK(s.u[i] == doctest::Approx(x * (1 - x) / 2).epsilon(1e-12));
    }
    CHECK(s.residual < 1e-14);
    CHECK(s.boundary_defect < 1e-12);
    CHECK(s.du[0] > 0.0);
    CHECK(s.du[g->size() - 1] < 0.0);
}

TEST_CASE("power phi against the closed-form profile")
{
    for (double r : {0.5, 1.0, 2.0, 3.0}) {
        CAPTURE(r);
        auto g = Grid::uniform(0.0, 1.0, 1025);
        auto s = solve_linear(make_power(r), GridFunction::constant(g, 1.0));
        const double expect = r / (r + 1) * std::pow(0.5, (r + 1) / r);
        CHECK(std::abs(sup_norm(s.u) - expect) <= 1e-8 * expect);
        double worst = 0.0;
        for (std::size_t i = 0; i < g->size(); ++i)
            worst = std::max(worst, std::abs(s.u[i] - power_oracle_u(r, (*g)[i])));
        CHECK(worst <= 1e-8 * expect);
    }
}

TEST_CASE("inverse with an interior kink")
{
    // xlog has phi'(1) = 0; with h = 4, c - H = 2 - 4x passes the level 1 at x = 1/4.
    // By parts, u(1/2) = (2T - 1/2 - T^2 ln T / 2 - T^2 / 4) / 4 with T (ln T + 1) = 2.
    double lo = 1.0, hi = 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mid * (std::log(mid) + 1.0) < 2.0 ? lo : hi) = mid;
    }
    const double T = 0.5 * (lo + hi);
    const double expected = 0.25 * (2.0 * T - 0.5 - 0.5 * T * T * std::log(T) - 0.25 * T * T);
    auto g = Grid::uniform(0.0, 1.0, 257);
    const auto s = solve_linear(parse_phi("xlog"), GridFunction::constant(g, 4.0));
    CHECK(s.c_star == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.u[128] == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("tolerance and iteration cap")
{
    auto g = Grid::uniform(0.0, 1.0, 65);
    auto h = GridFunction::sample(g, [](double x) { return 1.0 + 3.0 * x; });
    CHECK_THROWS_AS(solve_linear(make_power(2.0), h, {0.0, 200}), std::invalid_argument);
    CHECK_THROWS_AS(solve_linear(make_power(2.0), h, {1e-14, 3}), std::runtime_error);
}

TEST_CASE("homogeneity for power phi")
{
    auto g = Grid::uniform(0.0, 2.0, 513);
    auto h = GridFunction::sample(g, [](double x) { return 1.0 + std::sin(5 * x) * 0.8; });
    for (double r : {0.5, 2.0, 3.0}) {
        auto phi = make_power(r);
        const double kappa = 7.3;
        auto base = solve_linear(phi, h);
        auto scaled = solve_linear(phi, h.scaled(kappa));
        const double factor = std::pow(kappa, 1.0 / r);
        for (std::size_t i = 1; i + 1 < g->size(); ++i)
            CHECK(std::abs(scaled.u[i] - factor * base.u[i]) <= 1e-8 * factor * sup_norm(base.u));
    }
}

TEST_CASE("even forcing gives an even profile")
{
    auto g = Grid::uniform(-1.0, 1.0, 401);
    auto h = GridFunction::sample(g, [](double x) { return 1.0 + x * x; });
    auto s = solve_linear(parse_phi("arcsinh"), h);
    const double total = integral(h);
    CHECK(s.c_star == doctest::Approx(total / 2).epsilon(1e-9));
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(std::abs(s.u[i] - s.u[g->size() - 1 - i]) < 1e-10);
}

TEST_CASE("monotonicity of the solution operator")
{
    auto g = Grid::uniform(0.0, 1.0, 129);
    auto zero = GridFunction::constant(g, 0.0);
    auto one = GridFunction::constant(g, 1.0);
    CHECK(monotone_check(make_power(2.0), one, one, 0.0));
    // S(0) = 0 exactly; S(1) can end at -|u(b)|, the solver's own boundary defect
    CHECK(monotone_check(make_power(2.0), zero, one, solve_linear(make_power(2.0), one).boundary_defect));
    CHECK_THROWS_AS(monotone_check(make_power(2.0), one, zero, 0.0), std::invalid_argument);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto names = catalog_descriptors();
    for (int trial = 0; trial < 20; ++trial) {
        auto phi = parse_phi(names[trial % names.size()]);
        std::vector<double> v1(g->size()), v2(g->size());
        for (std::size_t i = 0; i < v1.size(); ++i) {
            v1[i] = 3.0 * U(rng);
            v2[i] = v1[i] + 2.0 * U(rng);
        }
        CHECK(monotone_check(phi, GridFunction(g, v1), GridFunction(g, v2), 1e-8));
    }
}

TEST_CASE("sandwich bounds")
{
    SUBCASE("identity phi, unit forcing")
    {
        auto g = Grid::uniform(0.0, 1.0, 257);
        auto h = GridFunction::constant(g, 1.0);
        auto b = lemma21_bounds(make_power(1.0), h);
        // \int_0^{1/2} (1/2 - y) dy = 1/8 on both sides
        CHECK(b.left_integral == doctest::Approx(0.125).epsilon(1e-12));
        CHECK(b.right_integral == doctest::Approx(0.125).epsilon(1e-12));
        CHECK(b.upper[128] == doctest::Approx(0.5));
        auto u = solve_linear(make_power(1.0), h).u;
        CHECK(pointwise_leq(b.lower, u, 1e-12));
        CHECK(pointwise_leq(u, b.upper, 1e-12));
    }
    SUBCASE("indicator forcing, phi = power(2)")
    {
        auto g = Grid::uniform(0.0, 1.0, 1025);
        auto h = indicator(g, 0.25, 0.5);
        auto phi = make_power(2.0);
        auto b = lemma21_bounds(phi, h);
        auto u = solve_linear(phi, h).u;
        CHECK(b.min_bracket > 0.0);
        CHECK(pointwise_leq(b.lower, u, 1e-10));
        CHECK(pointwise_leq(u, b.upper, 1e-10));
        CHECK(0.5 * b.min_bracket <= sup_norm(u));
    }
    SUBCASE("zero forcing is rejected")
    {
        auto g = Grid::uniform(0.0, 1.0, 17);
        CHECK_THROWS_AS(lemma21_bounds(make_power(1.0), GridFunction::constant(g, 0.0)), std::domain_error);
    }
}

TEST_CASE("cone bound")
{
    auto g = Grid::uniform(0.0, 1.0, 513);
    SUBCASE("identity, unit forcing: closed forms")
    {
        auto h = GridFunction::constant(g, 1.0);
        CHECK(lemma21_cone_bound(make_power(1.0), h, 0.0));
        for (double x = 0.0; x <= 1.0; x += 1.0 / 64)
            CHECK(x * (1 - x) / 2 >= 0.125 * std::min(x, 1 - x) - 1e-15);
    }
    SUBCASE("indicator forcing, power(0.5)")
    {
        CHECK(lemma21_cone_bound(make_power(0.5), indicator(g, 0.25, 0.5), 1e-12));
    }
    SUBCASE("boundary values vanish on both sides")
    {
        auto u = solve_linear(make_power(2.0), GridFunction::constant(g, 1.0)).u;
        CHECK(u[0] == 0.0);
        CHECK(dist_to_boundary(g)[0] == 0.0);
    }
}

TEST_CASE("c estimate in the scaled bracket inequality")
{
    auto g = Grid::uniform(0.0, 1.0, 257);
    auto h = GridFunction::constant(g, 1.0);
    auto phi = make_power(1.0);
    SUBCASE("identity, unit forcing: c = sqrt(1/8)")
    {
        CHECK(des3_bracket(phi, h, 3.0) == doctest::Approx(3.0 / 8).epsilon(1e-12));
        auto M = log_grid(1e-3, 1e3, 13);
        const double c = estimate_c_des3(phi, h, M);
        CHECK(c == doctest::Approx(std::sqrt(0.125)).epsilon(1e-8));
        CHECK(check_c_des3(phi, h, c, log_grid(1e-3, 1e3, 130)));
        CHECK_FALSE(check_c_des3(phi, h, c * 1.001, M));
    }
    SUBCASE("a single M is a weaker constraint")
    {
        auto phi2 = parse_phi("sum-powers:3,1.5");
        auto hi = indicator(g, 0.1, 0.7);
        auto M = log_grid(1e-2, 1e2, 9);
        const double multi = estimate_c_des3(phi2, hi, M);
        const double one[] = {1.0};
        CHECK(estimate_c_des3(phi2, hi, one) >= multi);
        CHECK(check_c_des3(phi2, hi, multi, log_grid(1e-2, 1e2, 90)));
    }
}

TEST_CASE("log grid")
{
    auto v = log_grid(1e-2, 1e2, 5);
    CHECK(v[2] == doctest::Approx(1.0));
    CHECK(v.front() == 1e-2);
    CHECK(v.back() == 1e2);
    CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), std::invalid_argument);
}

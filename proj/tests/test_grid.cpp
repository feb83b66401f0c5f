#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phibvp/grid.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace phibvp;

namespace {

GridFunction indicator(const GridPtr& g, double l, double r)
{
    return GridFunction::sample(g, [=](double x) { return (x > l && x < r) ? 1.0 : 0.0; });
}

} // namespace

TEST_CASE("grid construction rejects bad node sets")
{
    CHECK_THROWS_AS(Grid::uniform(1.0, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(Grid::uniform(0.0, 1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
    auto g = Grid::uniform(0.0, 1.0, 5);
    CHECK(g->a() == 0.0);
    CHECK(g->b() == 1.0);
    CHECK(g->cells() == 4);
    CHECK(g->cell_of(0.3) == 1);
    CHECK(g->cell_of(1.0) == 3);
}

TEST_CASE("grid function length must match")
{
    auto g = Grid::uniform(0.0, 1.0, 5);
    CHECK_THROWS_AS(GridFunction(g, {1.0, 2.0}), std::invalid_argument);
    auto other = Grid::uniform(0.0, 2.0, 5);
    CHECK_THROWS_AS(GridFunction::constant(g, 1.0) + GridFunction::constant(other, 1.0), std::invalid_argument);
}

TEST_CASE("cumulative integral")
{
    SUBCASE("zero weight")
    {
        auto g = Grid::uniform(0.0, 1.0, 17);
        auto H = cumulative_integral(GridFunction::constant(g, 0.0));
        CHECK(sup_norm(H) == 0.0);
    }
    SUBCASE("constant weight is exact at nodes")
    {
        auto g = Grid::uniform(0.0, 1.0, 33);
        auto H = cumulative_integral(GridFunction::constant(g, 1.0));
        for (std::size_t i = 0; i < g->size(); ++i)
            CHECK(H[i] == doctest::Approx((*g)[i]).epsilon(1e-15));
    }
    SUBCASE("linear weight against x^2")
    {
        auto g = Grid::uniform(0.0, 1.0, 1025);
        auto H = cumulative_integral(GridFunction::sample(g, [](double x) { return 2.0 * x; }));
        CHECK(std::abs(H[H.size() - 1] - 1.0) < 1e-6);
    }
    SUBCASE("linearity")
    {
        auto g = Grid::uniform(-1.0, 2.0, 101);
        auto h1 = GridFunction::sample(g, [](double x) { return std::sin(3 * x) + 1.2; });
        auto h2 = GridFunction::sample(g, [](double x) { return x * x; });
        auto lhs = cumulative_integral(2.5 * h1 + (-0.75) * h2);
        auto rhs = 2.5 * cumulative_integral(h1) + (-0.75) * cumulative_integral(h2);
        for (std::size_t i = 0; i < g->size(); ++i)
            CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-13));
    }
}

TEST_CASE("antiderivative between nodes is exact for piecewise-linear weights")
{
    auto g = Grid::uniform(0.0, 1.0, 3);
    auto h = GridFunction(g, {0.0, 1.0, 0.0}); // hat function
    auto H = cumulative_integral(h);
    // \int_0^x 2y dy = x^2 on [0, 0.5]
    CHECK(antiderivative_at(h, H, 0.25) == doctest::Approx(0.0625));
    CHECK(antiderivative_at(h, H, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("support data")
{
    SUBCASE("full support")
    {
        auto g = Grid::uniform(0.0, 1.0, 65);
        auto s = support_data(GridFunction::constant(g, 1.0));
        CHECK(s.alpha_h == doctest::Approx(0.0));
        CHECK(s.beta_h == doctest::Approx(1.0));
        CHECK(s.theta_bar == doctest::Approx(0.5));
        CHECK(s.theta_under == doctest::Approx(1.0));
    }
    SUBCASE("indicator of (0.25, 0.5)")
    {
        auto g = Grid::uniform(0.0, 1.0, 1025);
        // the sampled indicator ramps over one cell at each edge, so the
        // 1e-12 mass threshold is crossed within sqrt(2 * width * tol) of it
        auto s = support_data(indicator(g, 0.25, 0.5));
        CHECK(std::abs(s.alpha_h - 0.25) < 1e-6);
        CHECK(std::abs(s.beta_h - 0.5) < 1e-6);
        CHECK(std::abs(s.theta_bar - 0.375) < 1e-6);
        CHECK(std::abs(s.theta_under - 4.0 / 3.0) < 1e-5);
    }
    SUBCASE("indicator of (0, 0.5)")
    {
        auto g = Grid::uniform(0.0, 1.0, 1025);
        auto s = support_data(indicator(g, 0.0, 0.5));
        CHECK(std::abs(s.alpha_h) < 1e-6);
        CHECK(std::abs(s.beta_h - 0.5) < 1e-6);
        CHECK(std::abs(s.theta_bar - 0.25) < 1e-6);
        CHECK(std::abs(s.theta_under - 1.0) < 1e-5);
    }
    SUBCASE("no mass")
    {
        auto g = Grid::uniform(0.0, 1.0, 9);
        CHECK_THROWS_AS(support_data(GridFunction::constant(g, 0.0)), std::domain_error);
        CHECK_THROWS_AS(support_data(GridFunction::constant(g, -1.0)), std::invalid_argument);
    }
}

TEST_CASE("randomized weights keep theta_bar inside and theta_under * max delta >= 1/2")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = -1.0 + U(rng), b = a + 0.5 + 2.0 * U(rng);
        auto g = Grid::uniform(a, b, 129);
        const double l = a + (b - a) * 0.8 * U(rng);
        const double r = l + (b - l) * (0.05 + 0.95 * U(rng));
        auto h = GridFunction::sample(g, [&](double x) { return (x > l && x < r) ? 0.1 + U(rng) : 0.0; });
        if (integral(h) <= 0.0)
            continue;
        auto s = support_data(h);
        CHECK(s.theta_bar > s.alpha_h);
        CHECK(s.theta_bar < s.beta_h);
        CHECK(s.theta_under * sup_norm(dist_to_boundary(g)) >= 0.5 - 1e-12);
    }
}

TEST_CASE("distance to the boundary")
{
    auto g = Grid::uniform(0.0, 1.0, 3);
    auto d = dist_to_boundary(g);
    CHECK(d[1] == 0.5);
    CHECK(d[0] == 0.0);
    auto g2 = Grid::uniform(2.0, 6.0, 5);
    CHECK(dist_to_boundary(g2)[3] == 1.0);
}

TEST_CASE("norms and comparisons")
{
    auto g = Grid::uniform(0.0, 1.0, 1025);
    CHECK(sup_norm(GridFunction::constant(g, 0.0)) == 0.0);
    auto u = GridFunction::sample(g, [](double x) { return x * (1 - x) / 2; });
    CHECK(pointwise_leq(u, u, 0.0));
    CHECK(sup_norm(u) == doctest::Approx(0.125).epsilon(1e-9));
    CHECK_FALSE(pointwise_leq(u.scaled(2.0), u, 1e-3));
    CHECK_THROWS_AS(pointwise_leq(u, GridFunction::constant(Grid::uniform(0, 1, 5), 0.0), 0.0),
                    std::invalid_argument);
}

TEST_CASE("csv round trip")
{
    auto g = Grid::uniform(0.0, 1.0, 11);
    auto u = GridFunction::sample(g, [](double x) { return std::exp(x) / 3.0; });
    std::stringstream ss;
    write_csv(ss, u);
    CHECK(ss.str().rfind("x,value\n", 0) == 0);
    auto back = read_csv(ss);
    CHECK(back.grid() == u.grid());
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(back[i] == u[i]);

    std::stringstream bad("x,value\n0,1\n0.5,zz\n");
    CHECK_THROWS_AS(read_csv(bad), std::runtime_error);
}

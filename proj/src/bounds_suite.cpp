#include "phibvp/bounds_suite.hpp"

#include "phibvp/linear_solver.hpp"
#include "phibvp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phibvp {

double unit_uniform(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<BoundsCase> generate_bounds_cases(std::uint64_t seed, std::size_t count, std::size_t grid_size)
{
    std::mt19937_64 rng(seed);
    const auto catalog = catalog_descriptors();
    auto uniform = [&rng](double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); };
    std::vector<BoundsCase> out;
    out.reserve(count);
    while (out.size() < count) {
        const auto& phi = catalog[static_cast<std::size_t>(unit_uniform(rng) * catalog.size())];
        const double a = uniform(-1.0, 1.0);
        const double b = a + uniform(0.5, 2.0);
        const auto grid = Grid::uniform(a, b, grid_size);

        const int blocks = 1 + static_cast<int>(unit_uniform(rng) * 5);
        std::vector<double> cuts{a, b};
        for (int k = 1; k < blocks; ++k)
            cuts.push_back(uniform(a, b));
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> left(blocks), right(blocks);
        const double scale = std::pow(10.0, uniform(-2.0, 2.0));
        for (int k = 0; k < blocks; ++k) {
            const bool zero = blocks > 1 && unit_uniform(rng) < 0.25;
            left[k] = zero ? 0.0 : scale * uniform(0.0, 3.0);
            right[k] = zero ? 0.0 : scale * uniform(0.0, 3.0);
        }
        GridFunction h = GridFunction::sample(grid, [&](double x) {
            const auto it = std::upper_bound(cuts.begin() + 1, cuts.end() - 1, x);
            const auto k = static_cast<std::size_t>(it - cuts.begin() - 1);
            const double w = cuts[k + 1] - cuts[k];
            const double s = w > 0.0 ? (x - cuts[k]) / w : 0.0;
            return left[k] + (right[k] - left[k]) * s;
        });
        // keep only forcings with visible mass whose slope bound phi^{-1}(int h) is representable
        const double mass = integral(h);
        if (mass <= 1e-6 * scale * (b - a))
            continue;
        try {
            if (!std::isfinite(parse_phi(phi).inverse(mass)))
                continue;
        } catch (const std::overflow_error&) {
            continue;
        }
        out.push_back({phi, std::move(h)});
    }
    return out;
}

std::vector<double> bounds_M_grid(std::size_t refine)
{
    return log_grid(1e-6, 1e6, 24 * refine + 1);
}

BoundsCaseResult check_linear_bounds(const Homeomorphism& phi, const GridFunction& h, const SolutionProfile& s)
{
    BoundsCaseResult r;
    r.phi = phi.label();
    try {
        const double norm = sup_norm(s.u);
        const double slack = 1e-8 * (1.0 + norm);
        r.sup_norm = norm;

        const SandwichBounds bounds = lemma21_bounds(phi, h);
        r.sandwich_excess = std::max(max_excess(bounds.lower, s.u), max_excess(s.u, bounds.upper));
        r.sandwich_ok = r.sandwich_excess <= slack;

        const GridFunction delta = dist_to_boundary(h.grid_ptr());
        const double theta = bounds.support.theta_under;
        r.cone_excess = max_excess(delta.scaled(theta * norm), s.u);
        r.cone_ok = r.cone_excess <= slack;

        r.des2_excess = 0.5 * bounds.min_bracket - norm;
        r.des2_ok = r.des2_excess <= slack;

        const auto coarse = bounds_M_grid(1);
        const auto fine = bounds_M_grid(10);
        r.c_des3 = estimate_c_des3(phi, h, coarse);
        r.des3_ok = r.c_des3 > 0.0 && check_c_des3(phi, h, r.c_des3, fine);
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

BoundsCaseResult run_bounds_case(const BoundsCase& c)
{
    try {
        const Homeomorphism phi = parse_phi(c.phi);
        BoundsCaseResult r = check_linear_bounds(phi, c.h, solve_linear(phi, c.h));
        r.phi = c.phi;
        return r;
    } catch (const std::exception& e) {
        BoundsCaseResult r;
        r.phi = c.phi;
        r.error = e.what();
        return r;
    }
}

std::vector<BoundsCaseResult> run_bounds_suite(const std::vector<BoundsCase>& cases)
{
    std::vector<BoundsCaseResult> out(cases.size());
    parallel_for(cases.size(), [&](std::size_t i) { out[i] = run_bounds_case(cases[i]); });
    return out;
}

} // namespace phibvp

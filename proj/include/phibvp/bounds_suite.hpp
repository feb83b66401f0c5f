#pragma once

#include "phibvp/linear_solver.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace phibvp {

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double unit_uniform(std::mt19937_64& rng);

struct BoundsCase {
    std::string phi; // catalog descriptor
    GridFunction h;  // nonnegative, not a.e. zero
};

/// Random catalog phi and piecewise-linear nonnegative forcing with 1..5 blocks
/// (some possibly zero) on a random interval. Forcings whose slope bound
/// phi^{-1}(int h) overflows are skipped. Deterministic in the seed.
std::vector<BoundsCase> generate_bounds_cases(std::uint64_t seed, std::size_t count, std::size_t grid_size);

struct BoundsCaseResult {
    std::string phi;
    double sup_norm = 0.0;
    double sandwich_excess = 0.0; // max of (lower - u, u - upper), positive means violation
    double cone_excess = 0.0;
    double des2_excess = 0.0;     // min_bracket / 2 - ||u||
    double c_des3 = 0.0;
    bool sandwich_ok = false;
    bool cone_ok = false;
    bool des2_ok = false;
    bool des3_ok = false;         // c > 0 and passes the 10x finer M grid
    std::string error;

    bool ok() const { return error.empty() && sandwich_ok && cone_ok && des2_ok && des3_ok; }
};

/// Coarse M grid used for the estimate; the re-check uses ten times as many points.
std::vector<double> bounds_M_grid(std::size_t refine = 1);

/// Sandwich, cone and min-bracket checks on a solved profile at slack
/// 1e-8 (1 + ||u||), plus the c estimate re-checked on the finer M grid.
/// Failures inside the checks are reported through `error`.
BoundsCaseResult check_linear_bounds(const Homeomorphism& phi, const GridFunction& h, const SolutionProfile& s);

BoundsCaseResult run_bounds_case(const BoundsCase& c);

/// Runs every case in parallel; results keep the case order.
std::vector<BoundsCaseResult> run_bounds_suite(const std::vector<BoundsCase>& cases);

} // namespace phibvp

#pragma once

#include "phibvp/problem.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace phibvp {

/// Malformed or invalid problem file. The message carries the source name and
/// either the JSON line/column or the offending key path.
class ProblemFileError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ProblemFile {
    ProblemSpec spec;
    std::optional<GridFunction> h; // forcing for the linear solve; m when absent
};

/// Parses and validates a problem document. Keys:
///   interval [a, b], grid_size (>= 3), phi (catalog descriptor),
///   m, n, h (weights: a number, {"expr": ...} or {"nodes": [...], "values": [...]}),
///   lambda, mu, f, g ("power:q" or {"table": {"t": [...], "values": [...]}}),
///   F {c0, t0, q}, G1 {c1, t1, r1}, G2 {c2, t2, r2}.
/// Weight expressions: {"constant": c}, {"power": {"coef": c, "exponent": e}} for c (x - a)^e,
/// {"indicator": [l, r]}, {"product": [expr, ...]}. Unknown keys are rejected.
/// `grid_size_override` replaces the file's grid_size when set.
ProblemFile parse_problem_text(const std::string& text, const std::string& source = "<input>",
                               std::optional<std::size_t> grid_size_override = std::nullopt);

/// Same, reading the document from a file.
ProblemFile parse_problem(const std::string& path, std::optional<std::size_t> grid_size_override = std::nullopt);

} // namespace phibvp

#pragma once

#include <iosfwd>

namespace phibvp {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1; // bad problem data, failed construction or failed checks
constexpr int kExitUsage = 2;  // bad command line

/// Entry point of the phi-bvp tool. Data goes to files under --out-dir;
/// diagnostics go to `err`, help text to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace phibvp

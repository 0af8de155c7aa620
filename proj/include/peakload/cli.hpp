#pragma once

#include <ostream>

namespace peakload {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitInfeasible = 2,  // infeasible or unbounded program, empty or unbounded set
  kExitNotEquilibrium = 3,
  kExitCertificate = 4,  // a certificate, saddle or bound check failed
};

inline constexpr const char* kSeedEnv = "ROBUST_PEAKLOAD_SEED";

// Commands: solve, poa, subsidy, tau, validate-set. Reports go to `out`,
// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace peakload

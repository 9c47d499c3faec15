#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chorin {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double threshold = 0.0;  // bound it was compared against
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  double wall_time_s = 0.0;

  bool all_passed() const;
};

/// Invariant suite run before any study: assembly oracles, integration by
/// parts, Poisson convergence, Helmholtz orthogonality and idempotence,
/// increment coupling, the per-step divergence identity, zero-noise energy
/// decay, zero-noise determinism and modified == standard without noise.
ValidationReport run_invariant_suite(std::uint64_t seed = 20240601);

}  // namespace chorin

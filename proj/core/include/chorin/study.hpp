#pragma once

#include "chorin/chorin_scheme.hpp"
#include "chorin/error_norms.hpp"
#include "chorin/noise.hpp"
#include "chorin/qwiener.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace chorin {

enum class CouplingMode {
  FixedH,          // every N in mesh_cells paired with every time step
  BalancedHk,      // N = round(1 / k)
  BalancedHsqrtk,  // N = round(1 / sqrt(k))
};

const char* to_string(CouplingMode m) noexcept;

/// Monte Carlo convergence study. Time steps are given as step counts
/// M (k = T / M) so that k0 | k is an exact integer condition.
struct StudySpec {
  SchemeVariant variant = SchemeVariant::Standard;
  CouplingMode coupling = CouplingMode::FixedH;
  std::vector<std::size_t> mesh_cells{32};
  std::vector<std::size_t> coarse_steps{16, 32, 64, 128};
  std::size_t fine_steps = 1024;  // m0, k0 = T / m0
  std::size_t reference_cells = 32;
  std::size_t realizations = 100;  // Np
  std::uint64_t master_seed = 42;

  NoiseModel noise = NoiseModel::sqrt_plus_one(10.0);
  int truncation = 2;  // J
  IncrementScaling scaling = IncrementScaling::SqrtStep;
  double final_time = 1.0;
  double nu = 1.0;
  Vec2 forcing{1.0, 1.0};
  SolveConfig solve_cfg;

  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  std::size_t threads = 1;

  /// Throws InvalidArgument on violated invariants (k0 must divide every
  /// k, the reference must be at least as fine as every level, Np >= 1).
  void validate() const;

  struct Level {
    std::size_t cells;
    std::size_t steps;
  };
  /// The (N, M) pairs of the study, ordered by k descending then N ascending.
  std::vector<Level> levels() const;
};

struct ErrorTriple {
  double e_u_max = 0.0;
  double e_u_av = 0.0;
  double e_p_av = 0.0;
  double e_gradsum = 0.0;
};

struct StudyRow {
  std::size_t cells = 0;
  double h = 0.0;
  std::size_t steps = 0;
  double k = 0.0;
  std::size_t realizations = 0;  // Np effective (failed realizations excluded)
  ErrorTriple errors;
  ErrorTriple std_errors;  // Monte Carlo standard errors (delta method)
  double wall_time_s = 0.0;
};

struct RateRow {
  std::string group;  // "N=32" for FixedH, "balanced" otherwise
  std::string norm;   // e_u_max, e_u_av, e_p_av, e_gradsum
  RateFit fit;
  std::size_t points = 0;
};

struct StudyReport {
  std::vector<StudyRow> rows;  // k descending
  std::vector<RateRow> rates;  // only for groups with >= 3 rows
  std::size_t failed_realizations = 0;
  double reference_wall_time_s = 0.0;
  double total_wall_time_s = 0.0;
  std::string spec_hash;
  std::uint64_t master_seed = 0;
  std::string code_version;
  SchemeVariant variant = SchemeVariant::Standard;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Runs the study: per realization one fine path, one reference trajectory
/// at (k0, reference N), and one coarse trajectory per level driven by the
/// exactly coarsened increments. Coarse fields are prolonged to the
/// reference mesh when the meshes differ. Aggregation folds realizations in
/// index order, so the report does not depend on the thread count.
/// Throws StudyAborted when more than 5% of the realizations fail.
StudyReport run_convergence_study(const StudySpec& spec, const ProgressCallback& progress = {});

/// Version string compiled into the library.
const char* code_version() noexcept;

// ---------------------------------------------------------------------------
// Key-value configuration

/// Flat "section.key" -> value map, the in-memory form of the INI-style
/// configuration file and of the "config" object of the JSON summary.
using KeyValueConfig = std::map<std::string, std::string>;

/// Applies `config` on top of `base`; unknown keys and malformed values throw
/// InvalidArgument.
StudySpec apply_config(StudySpec base, const KeyValueConfig& config);

/// Canonical, lossless echo of every key.
KeyValueConfig to_config(const StudySpec& spec);

/// FNV-1a over the canonical echo, excluding run.threads.
std::string spec_hash(const StudySpec& spec);

/// Every key accepted by apply_config.
const std::vector<std::string>& known_config_keys();

// ---------------------------------------------------------------------------
// Presets

/// Named presets fig5_1, fig5_3, fig5_4 (standard scheme, B coefficient 10,
/// Np = 500) and fig5_5, fig5_6, fig5_7 (modified scheme, coefficient 1,
/// Np = 800), all with k0 = 1/4096, reference N = 50, J = 2, f = (1, 1).
///
/// `scale` in (0, 1] shrinks the study: Np -> max(2, ceil(Np s)), the number
/// of time levels -> max(3, ceil(L s)) keeping the coarsest, m0 -> the
/// largest power of two <= m0 s (but at least 4 M_max), and fixed mesh sizes
/// -> max(4, round(N sqrt(s))).
StudySpec make_preset(const std::string& name, double scale = 1.0);

const std::vector<std::string>& preset_names();

}  // namespace chorin

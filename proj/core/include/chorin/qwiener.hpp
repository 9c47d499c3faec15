#pragma once

#include "chorin/fields.hpp"
#include "chorin/mesh.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace chorin {

/// One spectral mode of the Q-Wiener covariance: eigenvalue lambda and the
/// L2-normalized eigenfunction 2 sin(j pi x1) sin(l pi x2).
struct QWienerMode {
  int j = 1;
  int l = 1;
  double eigenvalue = 0.0;

  double eigenfunction(const Vec2& x) const;
};

/// Truncated expansion over (j, l) in {1..J}^2, ordered with j outer.
struct QWienerSpec {
  int truncation = 1;
  std::vector<QWienerMode> modes;

  std::size_t num_modes() const noexcept { return modes.size(); }
};

QWienerSpec build_qwiener_spec(int truncation);

/// How fine increments are scaled: sqrt(k0) (Brownian) or k0 (the literal
/// printed formula, kept for side-by-side comparison).
enum class IncrementScaling { SqrtStep, Step };

/// Row-major table of per-mode increments, one row per time step.
using IncrementTable = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Fine-resolution Brownian increments for one realization. Entries are
/// rounded to multiples of 2^-48, which makes every coarsening sum exact.
struct BrownianPath {
  std::size_t fine_steps = 0;  // m0
  double fine_step = 0.0;      // k0 = T / m0
  std::uint64_t seed = 0;
  IncrementTable increments;   // m0 x num_modes
};

BrownianPath sample_brownian_path(const QWienerSpec& spec, std::size_t fine_steps, std::uint64_t seed,
                                  double final_time = 1.0,
                                  IncrementScaling scaling = IncrementScaling::SqrtStep);

/// Sums consecutive groups of `factor` rows in ascending fine order.
/// Throws NonDivisibleFactor unless factor divides the row count.
IncrementTable coarsen_increments(const IncrementTable& increments, std::size_t factor);
IncrementTable coarsen_increments(const BrownianPath& path, std::size_t factor);

/// Eigenfunction values at mesh vertices, cached once per (spec, mesh).
class ModeBasis {
 public:
  ModeBasis(const QWienerSpec& spec, const PeriodicMesh& mesh);

  std::size_t num_modes() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  std::size_t num_vertices() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  /// num_vertices x num_modes.
  const Eigen::MatrixXd& values() const noexcept { return values_; }

 private:
  Eigen::MatrixXd values_;
};

/// Nodal values of dW(x) = sum over modes of increment * e_mode(x).
ScalarField increment_field(const ModeBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& increments);
ScalarField increment_field(const QWienerSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& increments,
                            const PeriodicMesh& mesh);

/// splitmix64 finalizer; realization streams are seeded with
/// mix64(master_seed ^ mix64(index)).
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// Portable standard normal generator: mt19937_64 words mapped to doubles in
/// (0, 1) with 53-bit resolution, then Box-Muller (both outputs used, cosine
/// branch first). std::normal_distribution is not used because its output is
/// implementation-defined.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform_open();

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// CSV dump of a path: header "m,j1_l1,j1_l2,..." then one row per step.
std::string path_to_csv(const QWienerSpec& spec, const BrownianPath& path);

}  // namespace chorin

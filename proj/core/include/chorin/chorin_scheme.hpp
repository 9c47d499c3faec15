#pragma once

#include "chorin/fem_operators.hpp"
#include "chorin/fields.hpp"
#include "chorin/helmholtz.hpp"
#include "chorin/linear_solver.hpp"
#include "chorin/mesh.hpp"
#include "chorin/noise.hpp"
#include "chorin/qwiener.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace chorin {

enum class SchemeVariant { Standard, Modified };

const char* to_string(SchemeVariant v) noexcept;

/// Mesh, operators and the (deflated) scalar Laplace solver. Immutable and
/// shareable across threads.
struct SpaceDiscretization {
  PeriodicMesh mesh;
  FemOperators ops;
  SpdSolver laplace;

  SpaceDiscretization(std::size_t n_cells, const SolveConfig& cfg);
};

struct SchemeConfig {
  double final_time = 1.0;  // T
  std::size_t steps = 1;    // M; the time step is k = T / M
  double nu = 1.0;
  Vec2 forcing{1.0, 1.0};
  /// Optional f(t, x); evaluated nodally at t_{n+1} and overrides `forcing`.
  std::function<Vec2(double, const Vec2&)> forcing_callback;
  NoiseModel noise;
  SchemeVariant variant = SchemeVariant::Standard;
  SolveConfig solve_cfg;

  double step() const noexcept { return final_time / static_cast<double>(steps); }
  void validate() const;
};

struct ChorinState {
  VectorField u_tilde;
  /// The pressure entering the momentum equation: p^n (standard) or r^n
  /// (modified).
  ScalarField pressure;
  /// p^n in both variants; for the modified scheme r^n + zeta^{n-1} / k.
  ScalarField recovered_pressure;
  ScalarField p_time_integral;  // k * sum_{n <= m} p^n
  ScalarField r_time_integral;  // k * sum_{n <= m} r^n (equals the above for Standard)
  std::size_t step_index = 0;

  /// p^0 = r^0 = 0 and zero accumulators.
  static ChorinState initial(const VectorField& u0);
};

/// Advances single trajectories of the standard or Helmholtz-modified Chorin
/// P1 scheme. Holds the factorized momentum operator for one (mesh, k).
class ChorinStepper {
 public:
  ChorinStepper(std::shared_ptr<const SpaceDiscretization> space, SchemeConfig cfg);

  const SchemeConfig& config() const noexcept { return cfg_; }
  const SpaceDiscretization& space() const noexcept { return *space_; }
  double step() const noexcept { return k_; }

  /// One step of the scheme selected in the config.
  void advance(ChorinState& state, const ScalarField& dW) const;

  /// Momentum solve with pressure term -k G p^n and load (f, v) + (B dW, v),
  /// followed by the projection solve for p^{n+1}.
  void standard_step(ChorinState& state, const ScalarField& dW) const;

  /// Helmholtz-split step: the curl-free part of B(u~^m) dW is moved into the
  /// pressure, p^{m+1} = r^{m+1} + zeta^m / k.
  void modified_step(ChorinState& state, const ScalarField& dW) const;

  /// Modified step for an explicitly supplied noise load G^m.
  void modified_step_with_load(ChorinState& state, const ElementwiseVectorField& load) const;

 private:
  void step_impl(ChorinState& state, const ElementwiseVectorField& noise_load, const ScalarField& potential) const;
  Eigen::VectorXd forcing_moments(double t) const;

  std::shared_ptr<const SpaceDiscretization> space_;
  SchemeConfig cfg_;
  double k_;
  SpdSolver momentum_;
  Eigen::VectorXd constant_forcing_moments_;
};

/// max_j |(u~, grad phi_j) - k (grad p, grad phi_j)| / ||u~||_{L2}
/// (absolute when u~ = 0).
double divergence_residual(const FemOperators& ops, const VectorField& u_tilde, const ScalarField& pressure,
                           double k);

enum class StoragePolicy { FullFields, NormsOnly };

struct Checkpoint {
  std::size_t step = 0;
  double time = 0.0;
  VectorField u_tilde;
  ScalarField recovered_pressure;
  ScalarField p_time_integral;
  ScalarField r_time_integral;
  double u_l2 = 0.0;
  double u_h1 = 0.0;
  double p_integral_l2 = 0.0;
};

struct TrajectoryRecord {
  std::size_t mesh_cells = 0;
  double step = 0.0;
  StoragePolicy policy = StoragePolicy::FullFields;
  std::vector<Checkpoint> checkpoints;
};

/// Runs m = 0..M-1 with dW_{m+1} built from row m of `increments`
/// (M rows required). Checkpoint steps must be strictly increasing and <= M.
TrajectoryRecord run_trajectory(const ChorinStepper& stepper, const ModeBasis& basis,
                                const IncrementTable& increments, const VectorField& initial,
                                std::span<const std::size_t> checkpoint_steps,
                                StoragePolicy policy = StoragePolicy::FullFields);

/// Same, with checkpoint times (each a multiple of k within 1e-9 k).
TrajectoryRecord run_trajectory(const ChorinStepper& stepper, const ModeBasis& basis,
                                const IncrementTable& increments, const VectorField& initial,
                                std::span<const double> checkpoint_times,
                                StoragePolicy policy = StoragePolicy::FullFields);

/// Every step 0..M.
std::vector<std::size_t> all_steps(std::size_t steps);

}  // namespace chorin

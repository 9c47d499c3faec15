#pragma once

#include "chorin/chorin_scheme.hpp"
#include "chorin/fem_operators.hpp"

#include <utility>
#include <vector>

namespace chorin {

/// Squared velocity error contributions of one realization, on the checkpoint
/// grid t_m = m k of the coarse record (m = 0..M).
struct VelocityErrorContributions {
  std::vector<double> u_sq;  // ||u~_ref(t_m) - u~^m||^2
  double u_av_sq = 0.0;      // k sum_m ||u~_ref(t_m) - u~^m||^2
  double gradsum_sq = 0.0;   // max_l ||k sum_{m<=l} grad(u~_ref(t_m) - u~^m)||^2

  /// Single-realization norms: (max_m sqrt(u_sq), sqrt(u_av_sq), sqrt(gradsum_sq)).
  double e_u_max() const;
  double e_u_av() const;
  double e_gradsum() const;
};

/// Both records must be FullFields, live on the mesh of `ops`, and the
/// reference must carry a checkpoint at every coarse checkpoint time
/// (CheckpointMismatch otherwise).
VelocityErrorContributions velocity_error_norms(const TrajectoryRecord& reference, const TrajectoryRecord& coarse,
                                                const FemOperators& ops);

/// k sum_m ||P_ref(t_m) - P(t_m)||^2 for the time-integrated pressures.
/// Throws InvariantViolation if either accumulator is not mean-free.
double pressure_error_norm(const TrajectoryRecord& reference, const TrajectoryRecord& coarse,
                           const FemOperators& ops);

/// Relative tolerance of the zero-mean guard in pressure_error_norm.
inline constexpr double kPressureMeanTolerance = 1e-9;

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Least squares fit of log(error) = slope log(k) + intercept.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

}  // namespace chorin

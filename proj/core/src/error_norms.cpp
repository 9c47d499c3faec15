#include "chorin/error_norms.hpp"

#include "chorin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chorin {

double VelocityErrorContributions::e_u_max() const {
  double m = 0.0;
  for (double v : u_sq) m = std::max(m, v);
  return std::sqrt(m);
}

double VelocityErrorContributions::e_u_av() const { return std::sqrt(u_av_sq); }
double VelocityErrorContributions::e_gradsum() const { return std::sqrt(gradsum_sq); }

namespace {

void require_full(const TrajectoryRecord& r, const char* which) {
  if (r.policy != StoragePolicy::FullFields) {
    throw InvalidArgument(std::string(which) + " record was stored without fields");
  }
}

/// Reference checkpoint index for each coarse checkpoint.
std::vector<std::size_t> match_checkpoints(const TrajectoryRecord& reference, const TrajectoryRecord& coarse) {
  std::vector<std::size_t> idx;
  idx.reserve(coarse.checkpoints.size());
  const double tol = 1e-9 * coarse.step;
  std::size_t j = 0;
  for (const auto& c : coarse.checkpoints) {
    while (j < reference.checkpoints.size() && reference.checkpoints[j].time < c.time - tol) ++j;
    if (j == reference.checkpoints.size() || std::abs(reference.checkpoints[j].time - c.time) > tol) {
      throw CheckpointMismatch("no reference checkpoint at t = " + std::to_string(c.time));
    }
    idx.push_back(j);
  }
  return idx;
}

void check_mesh(const Checkpoint& c, const FemOperators& ops) {
  if (c.u_tilde.num_vertices() != ops.num_vertices() || c.p_time_integral.size() != ops.num_vertices()) {
    throw DimensionMismatch("error norms: checkpoint fields do not live on the comparison mesh");
  }
}

void check_mean_free(const ScalarField& p, const FemOperators& ops, const char* which) {
  const double mean = discrete_mean(p.coeffs, ops);
  const double scale = std::max(1.0, l2_norm(p, ops));
  if (std::abs(mean) > kPressureMeanTolerance * scale) {
    throw InvariantViolation(std::string(which) + " time-integrated pressure has discrete mean " +
                             std::to_string(mean));
  }
}

}  // namespace

VelocityErrorContributions velocity_error_norms(const TrajectoryRecord& reference, const TrajectoryRecord& coarse,
                                                const FemOperators& ops) {
  require_full(reference, "reference");
  require_full(coarse, "coarse");
  const auto idx = match_checkpoints(reference, coarse);
  const double k = coarse.step;

  VelocityErrorContributions out;
  out.u_sq.reserve(idx.size());
  Eigen::VectorXd running = Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(ops.num_vertices()));
  for (std::size_t m = 0; m < idx.size(); ++m) {
    const auto& c = coarse.checkpoints[m];
    const auto& r = reference.checkpoints[idx[m]];
    check_mesh(c, ops);
    check_mesh(r, ops);
    const VectorField diff(r.u_tilde.coeffs - c.u_tilde.coeffs);
    const double l2 = l2_norm(diff, ops);
    out.u_sq.push_back(l2 * l2);
    out.u_av_sq += k * l2 * l2;
    running.noalias() += k * diff.coeffs;
    out.gradsum_sq = std::max(out.gradsum_sq, running.dot(ops.stiff_v * running));
  }
  return out;
}

double pressure_error_norm(const TrajectoryRecord& reference, const TrajectoryRecord& coarse,
                           const FemOperators& ops) {
  require_full(reference, "reference");
  require_full(coarse, "coarse");
  const auto idx = match_checkpoints(reference, coarse);
  const double k = coarse.step;
  double sum = 0.0;
  for (std::size_t m = 0; m < idx.size(); ++m) {
    const auto& c = coarse.checkpoints[m];
    const auto& r = reference.checkpoints[idx[m]];
    check_mesh(c, ops);
    check_mesh(r, ops);
    check_mean_free(c.p_time_integral, ops, "coarse");
    check_mean_free(r.p_time_integral, ops, "reference");
    const double l2 = l2_norm(ScalarField(r.p_time_integral.coeffs - c.p_time_integral.coeffs), ops);
    sum += k * l2 * l2;
  }
  return sum;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw InvalidArgument("fit_rate: need at least two points");
  std::vector<double> xs, ys;
  for (const auto& [k, e] : points) {
    if (!(k > 0.0) || !(e > 0.0)) throw InvalidArgument("fit_rate: step sizes and errors must be positive");
    xs.push_back(std::log(k));
    ys.push_back(std::log(e));
  }
  const double n = static_cast<double>(points.size());
  double x_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x_mean += xs[i] / n;
    y_mean += ys[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
    sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_rate: step sizes must not all coincide");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace chorin

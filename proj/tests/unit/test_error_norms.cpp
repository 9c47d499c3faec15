#include "support/dense_oracle.hpp"

#include <chorin/error_norms.hpp>
#include <chorin/errors.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace chorin;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937& gen, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

Eigen::VectorXd mean_free(const oracle::DenseOperators& d, Eigen::VectorXd x) {
  x.array() -= (d.mass * x).sum();
  return x;
}

TrajectoryRecord random_record(const PeriodicMesh& mesh, const oracle::DenseOperators& d, std::size_t steps,
                               std::mt19937& gen) {
  TrajectoryRecord r;
  r.mesh_cells = mesh.n_cells();
  r.step = 1.0 / static_cast<double>(steps);
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  for (std::size_t m = 0; m <= steps; ++m) {
    Checkpoint c;
    c.step = m;
    c.time = static_cast<double>(m) * r.step;
    c.u_tilde = VectorField(random_vector(2 * n, gen, 0.1));
    c.p_time_integral = ScalarField(mean_free(d, random_vector(n, gen, 0.1)), true);
    c.recovered_pressure = c.p_time_integral;
    c.r_time_integral = c.p_time_integral;
    r.checkpoints.push_back(std::move(c));
  }
  return r;
}

struct DenseNorms {
  double u_max_sq = 0.0, u_av_sq = 0.0, gradsum_sq = 0.0, p_av_sq = 0.0;
};

// Direct evaluation of the sums with dense matrices, indexing the reference
// by time through the ratio of step counts.
DenseNorms brute_force(const TrajectoryRecord& ref, const TrajectoryRecord& coarse,
                       const oracle::DenseOperators& d) {
  const Eigen::MatrixXd mv = oracle::block_diag2(d.mass), kv = oracle::block_diag2(d.stiff);
  const std::size_t ratio = (ref.checkpoints.size() - 1) / (coarse.checkpoints.size() - 1);
  const double k = coarse.step;
  DenseNorms out;
  Eigen::VectorXd running = Eigen::VectorXd::Zero(mv.rows());
  for (std::size_t m = 0; m < coarse.checkpoints.size(); ++m) {
    const auto& r = ref.checkpoints[m * ratio];
    const auto& c = coarse.checkpoints[m];
    const Eigen::VectorXd du = r.u_tilde.coeffs - c.u_tilde.coeffs;
    const double sq = du.transpose() * mv * du;
    out.u_max_sq = std::max(out.u_max_sq, sq);
    out.u_av_sq += k * sq;
    running += k * du;
    out.gradsum_sq = std::max(out.gradsum_sq, static_cast<double>(running.transpose() * kv * running));
    const Eigen::VectorXd dp = r.p_time_integral.coeffs - c.p_time_integral.coeffs;
    out.p_av_sq += k * static_cast<double>(dp.transpose() * d.mass * dp);
  }
  return out;
}

}  // namespace

TEST(ErrorNorms, MatchDenseBruteForceOnFourCells) {
  const PeriodicMesh mesh(4);
  const auto ops = assemble_operators(mesh);
  const auto d = oracle::dense_assemble(mesh);
  std::mt19937 gen(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ref = random_record(mesh, d, 8, gen);
    const auto coarse = random_record(mesh, d, 4, gen);
    const auto v = velocity_error_norms(ref, coarse, ops);
    const double p = pressure_error_norm(ref, coarse, ops);
    const auto oracle = brute_force(ref, coarse, d);
    EXPECT_NEAR(v.e_u_max() * v.e_u_max(), oracle.u_max_sq, 1e-12);
    EXPECT_NEAR(v.u_av_sq, oracle.u_av_sq, 1e-12);
    EXPECT_NEAR(v.gradsum_sq, oracle.gradsum_sq, 1e-12);
    EXPECT_NEAR(p, oracle.p_av_sq, 1e-12);
    EXPECT_EQ(v.u_sq.size(), 5u);
  }
}

TEST(ErrorNorms, IdenticalTrajectoriesGiveZero) {
  const PeriodicMesh mesh(4);
  const auto ops = assemble_operators(mesh);
  const auto d = oracle::dense_assemble(mesh);
  std::mt19937 gen(1);
  const auto r = random_record(mesh, d, 4, gen);
  const auto v = velocity_error_norms(r, r, ops);
  EXPECT_EQ(v.e_u_max(), 0.0);
  EXPECT_EQ(v.e_u_av(), 0.0);
  EXPECT_EQ(v.e_gradsum(), 0.0);
  EXPECT_EQ(pressure_error_norm(r, r, ops), 0.0);
}

TEST(ErrorNorms, ConstantOffsetAfterTheInitialState) {
  // Both trajectories start from the same initial field; a constant offset c
  // on every later checkpoint gives e_u_max = |c| and, with the sum over
  // m = 1..M, e_u_av = sqrt(T) |c|.
  const PeriodicMesh mesh(4);
  const auto ops = assemble_operators(mesh);
  const auto d = oracle::dense_assemble(mesh);
  std::mt19937 gen(5);
  const auto ref = random_record(mesh, d, 4, gen);
  auto coarse = ref;
  const Vec2 c{0.3, -0.4};
  for (std::size_t m = 1; m < coarse.checkpoints.size(); ++m) {
    for (Eigen::Index v = 0; v < 16; ++v) {
      coarse.checkpoints[m].u_tilde.coeffs[2 * v] += c[0];
      coarse.checkpoints[m].u_tilde.coeffs[2 * v + 1] += c[1];
    }
  }
  const auto v = velocity_error_norms(ref, coarse, ops);
  EXPECT_NEAR(v.e_u_max(), 0.5, 1e-14);
  EXPECT_NEAR(v.e_u_av(), std::sqrt(1.0) * 0.5, 1e-14);
  EXPECT_NEAR(v.e_gradsum(), 0.0, 1e-12);
}

TEST(ErrorNorms, PressureMeanGuard) {
  const PeriodicMesh mesh(4);
  const auto ops = assemble_operators(mesh);
  const auto d = oracle::dense_assemble(mesh);
  std::mt19937 gen(6);
  auto ref = random_record(mesh, d, 4, gen);
  for (auto& c : ref.checkpoints) c.p_time_integral.coeffs.setZero();
  auto coarse = ref;
  for (auto& c : coarse.checkpoints) c.p_time_integral.coeffs.setOnes();
  EXPECT_THROW(pressure_error_norm(ref, coarse, ops), InvariantViolation);
  EXPECT_DOUBLE_EQ(pressure_error_norm(ref, ref, ops), 0.0);
}

TEST(ErrorNorms, CheckpointMismatchAndPolicy) {
  const PeriodicMesh mesh(4);
  const auto ops = assemble_operators(mesh);
  const auto d = oracle::dense_assemble(mesh);
  std::mt19937 gen(7);
  const auto ref = random_record(mesh, d, 3, gen);
  const auto coarse = random_record(mesh, d, 2, gen);
  EXPECT_THROW(velocity_error_norms(ref, coarse, ops), CheckpointMismatch);
  auto norms_only = ref;
  norms_only.policy = StoragePolicy::NormsOnly;
  EXPECT_THROW(velocity_error_norms(norms_only, ref, ops), InvalidArgument);
  const PeriodicMesh other(2);
  EXPECT_THROW(velocity_error_norms(ref, ref, assemble_operators(other)), DimensionMismatch);
}

TEST(FitRate, ExactPowerLaws) {
  for (double rate : {0.5, 0.25}) {
    std::vector<std::pair<double, double>> pts;
    for (double k : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) pts.emplace_back(k, 3.0 * std::pow(k, rate));
    const auto fit = fit_rate(pts);
    EXPECT_NEAR(fit.slope, rate, 1e-12);
    EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
    EXPECT_NEAR(fit.rms_residual, 0.0, 1e-12);
  }
  EXPECT_NEAR(fit_rate({{0.1, 2.0}, {0.05, 2.0}}).slope, 0.0, 1e-15);
  EXPECT_THROW(fit_rate({{0.1, 1.0}}), InvalidArgument);
  EXPECT_THROW(fit_rate({{0.1, 1.0}, {0.05, 0.0}}), InvalidArgument);
  EXPECT_THROW(fit_rate({{0.1, 1.0}, {0.1, 2.0}}), InvalidArgument);
}

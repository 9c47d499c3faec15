#include <chorin/errors.hpp>
#include <chorin/fem_operators.hpp>
#include <chorin/linear_solver.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace chorin;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

SolveConfig config(SolverMethod method, bool deflate) {
  SolveConfig cfg;
  cfg.method = method;
  cfg.deflate_constants = deflate;
  cfg.rel_tol = 1e-12;
  return cfg;
}

}  // namespace

class BothMethods : public ::testing::TestWithParam<SolverMethod> {};

TEST_P(BothMethods, MassSystemRecoversSolution) {
  const auto ops = assemble_operators(PeriodicMesh(8));
  const Eigen::VectorXd y = random_vector(64, 4);
  const SpdSolver solver(ops.mass_s, config(GetParam(), false));
  const Eigen::VectorXd x = solver.solve(ops.mass_s * y);
  EXPECT_LE((x - y).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST_P(BothMethods, DeflatedZeroRhsGivesZero) {
  const auto ops = assemble_operators(PeriodicMesh(8));
  const SpdSolver solver(ops.stiff_s, config(GetParam(), true));
  const Eigen::VectorXd x = solver.solve(Eigen::VectorXd::Zero(64));
  EXPECT_EQ(x.lpNorm<Eigen::Infinity>(), 0.0);
}

TEST_P(BothMethods, DeflatedSolutionHasZeroMeanAndSolves) {
  const auto ops = assemble_operators(PeriodicMesh(12));
  Eigen::VectorXd y = random_vector(144, 5);
  y.array() -= y.mean();
  const SpdSolver solver(ops.stiff_s, config(GetParam(), true));
  const Eigen::VectorXd x = solver.solve(ops.stiff_s * y);
  EXPECT_NEAR(x.mean(), 0.0, 1e-13);
  EXPECT_LE((x - y).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST_P(BothMethods, IncompatibleRhsRejected) {
  const auto ops = assemble_operators(PeriodicMesh(4));
  const SpdSolver solver(ops.stiff_s, config(GetParam(), true));
  EXPECT_THROW(solver.solve(Eigen::VectorXd::Ones(16)), IncompatibleRhs);
}

INSTANTIATE_TEST_SUITE_P(Solvers, BothMethods,
                         ::testing::Values(SolverMethod::ConjugateGradient, SolverMethod::SparseCholesky));

TEST(LinearSolver, CancellationNoiseIsNotIncompatible) {
  // A rhs that is pure rounding noise of much larger terms must be accepted
  // once the caller states the scale it was formed from.
  Eigen::VectorXd b(4);
  b << 1e-17, 2e-17, -1e-17, 3e-17;
  EXPECT_THROW(deflate_rhs(b), IncompatibleRhs);
  Eigen::VectorXd c = b;
  EXPECT_NO_THROW(deflate_rhs(c, 1.0));
  EXPECT_NEAR(c.sum(), 0.0, 1e-30);
}

TEST(LinearSolver, MaxIterationsExceeded) {
  const auto ops = assemble_operators(PeriodicMesh(16));
  SolveConfig cfg = config(SolverMethod::ConjugateGradient, true);
  cfg.max_iter = 1;
  Eigen::VectorXd b = random_vector(256, 6);
  b.array() -= b.mean();
  try {
    solve_spd(ops.stiff_s, b, cfg);
    FAIL() << "expected MaxIterationsExceeded";
  } catch (const MaxIterationsExceeded& e) {
    EXPECT_EQ(e.iterations(), 1u);
    EXPECT_GT(e.residual(), cfg.rel_tol);
    EXPECT_EQ(e.kind(), ErrorKind::Numerical);
  }
}

TEST(LinearSolver, ConfigValidation) {
  SolveConfig cfg;
  cfg.rel_tol = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.rel_tol = 1e-10;
  cfg.max_iter = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  const auto ops = assemble_operators(PeriodicMesh(2));
  EXPECT_THROW(solve_spd(ops.stiff_s, Eigen::VectorXd::Zero(3), SolveConfig{}), DimensionMismatch);
}

TEST(LinearSolver, CholeskyAndCgAgree) {
  const auto ops = assemble_operators(PeriodicMesh(10));
  const SparseMatrix a = SparseMatrix(ops.mass_s + 0.01 * ops.stiff_s);
  const Eigen::VectorXd b = random_vector(100, 7);
  const Eigen::VectorXd x1 = SpdSolver(a, config(SolverMethod::SparseCholesky, false)).solve(b);
  const Eigen::VectorXd x2 = SpdSolver(a, config(SolverMethod::ConjugateGradient, false)).solve(b);
  EXPECT_LE((x1 - x2).norm() / x1.norm(), 1e-10);
}

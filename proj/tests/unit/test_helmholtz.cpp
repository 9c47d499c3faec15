#include <chorin/chorin_scheme.hpp>
#include <chorin/errors.hpp>
#include <chorin/helmholtz.hpp>

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

class HelmholtzTest : public ::testing::Test {
 protected:
  SpaceDiscretization space{8, SolveConfig{}};
};

}  // namespace

TEST_F(HelmholtzTest, GradientLoadIsFullyAbsorbed) {
  ScalarField psi(random_vector(64, 1));
  normalize_mean(psi, space.ops);
  // The field grad psi: zero nodal part and gradient potential -psi.
  ElementwiseVectorField load{VectorField(64), ScalarField(Eigen::VectorXd(-psi.coeffs))};
  const auto r = helmholtz_decompose(space.ops, load, space.laplace);
  EXPECT_LE((r.potential.coeffs - psi.coeffs).lpNorm<Eigen::Infinity>(), 1e-10);
  EXPECT_LE(r.projected_load.gradient_potential.coeffs.lpNorm<Eigen::Infinity>(), 1e-10);
  EXPECT_LE(gradient_moments(space.ops, r.projected_load).norm(), 1e-10 * psi.coeffs.norm());
}

TEST_F(HelmholtzTest, ConstantLoadIsDivergenceFree) {
  VectorField c(64);
  for (Eigen::Index v = 0; v < 64; ++v) {
    c.coeffs[2 * v] = 1.5;
    c.coeffs[2 * v + 1] = -0.25;
  }
  const auto r = helmholtz_decompose(space.ops, c, space.laplace);
  EXPECT_LE(r.potential.coeffs.lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_EQ(r.projected_load.nodal.coeffs, c.coeffs);
}

TEST_F(HelmholtzTest, RandomLoadOrthogonalToGradients) {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const VectorField g(random_vector(128, 10 + seed));
    const auto r = helmholtz_decompose(space.ops, g, space.laplace);
    EXPECT_LE(orthogonality_residual(space.ops, ElementwiseVectorField::from_nodal(g), r), 1e-9);
    EXPECT_NEAR(discrete_mean(r.potential.coeffs, space.ops), 0.0, 1e-14);
    // Idempotent: decomposing eta again yields no further gradient part.
    const auto again = helmholtz_decompose(space.ops, r.projected_load, space.laplace);
    EXPECT_LE(again.potential.coeffs.lpNorm<Eigen::Infinity>(), 1e-10 * std::max(1.0, r.potential.coeffs.norm()));
  }
}

TEST_F(HelmholtzTest, CgBackendAgrees) {
  SolveConfig cg;
  cg.method = SolverMethod::ConjugateGradient;
  cg.rel_tol = 1e-13;
  const VectorField g(random_vector(128, 77));
  const auto a = helmholtz_decompose(space.ops, g, space.laplace);
  const auto b = helmholtz_decompose(space.ops, g, cg);
  EXPECT_LE((a.potential.coeffs - b.potential.coeffs).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST_F(HelmholtzTest, RequiresDeflatedSolver) {
  const SpdSolver plain(SparseMatrix(space.ops.stiff_s + space.ops.mass_s), SolveConfig{});
  EXPECT_THROW(helmholtz_decompose(space.ops, VectorField(64), plain), InvalidArgument);
  EXPECT_THROW(helmholtz_decompose(space.ops, VectorField(10), space.laplace), DimensionMismatch);
}

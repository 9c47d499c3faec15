#include "chorin/helmholtz.hpp"

#include "chorin/errors.hpp"

namespace chorin {

Eigen::VectorXd gradient_moments(const FemOperators& ops, const ElementwiseVectorField& w) {
  if (w.nodal.num_vertices() != ops.num_vertices() || w.gradient_potential.size() != ops.num_vertices()) {
    throw DimensionMismatch("gradient_moments: field does not match operators");
  }
  Eigen::VectorXd m = ops.grad_coupling.transpose() * w.nodal.coeffs;
  m.noalias() -= ops.stiff_s * w.gradient_potential.coeffs;
  return m;
}

Eigen::VectorXd vector_moments(const FemOperators& ops, const ElementwiseVectorField& w) {
  if (w.nodal.num_vertices() != ops.num_vertices() || w.gradient_potential.size() != ops.num_vertices()) {
    throw DimensionMismatch("vector_moments: field does not match operators");
  }
  Eigen::VectorXd m = ops.mass_v * w.nodal.coeffs;
  m.noalias() -= ops.grad_coupling * w.gradient_potential.coeffs;
  return m;
}

HelmholtzResult helmholtz_decompose(const FemOperators& ops, const ElementwiseVectorField& load,
                                    const SpdSolver& laplace) {
  if (!laplace.config().deflate_constants) {
    throw InvalidArgument("helmholtz_decompose: the Laplace solver must deflate constants");
  }
  HelmholtzResult result;
  const double scale = abs_product_norm(ops.grad_coupling.transpose(), load.nodal.coeffs) +
                       abs_product_norm(ops.stiff_s, load.gradient_potential.coeffs);
  result.potential = ScalarField(laplace.solve(gradient_moments(ops, load), nullptr, scale));
  normalize_mean(result.potential, ops);
  result.projected_load.nodal = load.nodal;
  result.projected_load.gradient_potential =
      ScalarField(load.gradient_potential.coeffs + result.potential.coeffs);
  return result;
}

HelmholtzResult helmholtz_decompose(const FemOperators& ops, const VectorField& load, const SpdSolver& laplace) {
  return helmholtz_decompose(ops, ElementwiseVectorField::from_nodal(load), laplace);
}

HelmholtzResult helmholtz_decompose(const FemOperators& ops, const VectorField& load, const SolveConfig& cfg) {
  SolveConfig c = cfg;
  c.deflate_constants = true;
  return helmholtz_decompose(ops, load, SpdSolver(ops.stiff_s, c));
}

double orthogonality_residual(const FemOperators& ops, const ElementwiseVectorField& load,
                              const HelmholtzResult& result) {
  const double scale = gradient_moments(ops, load).norm();
  const double res = gradient_moments(ops, result.projected_load).norm();
  return scale > 0.0 ? res / scale : res;
}

}  // namespace chorin

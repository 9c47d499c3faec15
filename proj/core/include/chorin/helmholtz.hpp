#pragma once

#include "chorin/fem_operators.hpp"
#include "chorin/fields.hpp"
#include "chorin/linear_solver.hpp"

namespace chorin {

/// A vector field w = nodal_h - grad(gradient_potential_h): a P1 part minus
/// the piecewise-constant gradient of a P1 scalar. Kept symbolic so its loads
/// can be assembled exactly.
struct ElementwiseVectorField {
  VectorField nodal;
  ScalarField gradient_potential;

  static ElementwiseVectorField from_nodal(VectorField v) {
    ScalarField zero(v.num_vertices());
    return {std::move(v), std::move(zero)};
  }
};

/// (w, grad phi_j) for every scalar basis function phi_j.
Eigen::VectorXd gradient_moments(const FemOperators& ops, const ElementwiseVectorField& w);

/// (w, v_i) for every vector basis function v_i (interleaved).
Eigen::VectorXd vector_moments(const FemOperators& ops, const ElementwiseVectorField& w);

struct HelmholtzResult {
  ScalarField potential;                 // zeta_h, zero mean
  ElementwiseVectorField projected_load; // eta = load - grad zeta_h
};

/// Discrete Helmholtz split: (grad zeta, grad phi) = (load, grad phi) for all
/// P1 phi, eta = load - grad zeta. `laplace` must be a deflated solver for
/// ops.stiff_s.
HelmholtzResult helmholtz_decompose(const FemOperators& ops, const ElementwiseVectorField& load,
                                    const SpdSolver& laplace);
HelmholtzResult helmholtz_decompose(const FemOperators& ops, const VectorField& load, const SpdSolver& laplace);
HelmholtzResult helmholtz_decompose(const FemOperators& ops, const VectorField& load, const SolveConfig& cfg);

/// ||(eta, grad phi_j)_j|| relative to ||(load, grad phi_j)_j|| (absolute when
/// the latter vanishes).
double orthogonality_residual(const FemOperators& ops, const ElementwiseVectorField& load,
                              const HelmholtzResult& result);

}  // namespace chorin

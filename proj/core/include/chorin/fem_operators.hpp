#pragma once

#include "chorin/fields.hpp"
#include "chorin/linear_solver.hpp"
#include "chorin/mesh.hpp"

#include <functional>

namespace chorin {

/// Assembled P1 operators on a periodic mesh.
///
/// grad_coupling G has rows indexed by interleaved vector dofs (i, c) and
/// columns by scalar dofs j, with G[(i,c), j] = integral of d_c(chi_j) phi_i,
/// so that v^T G q = (grad q_h, v_h).
struct FemOperators {
  SparseMatrix mass_s;
  SparseMatrix stiff_s;
  SparseMatrix mass_v;
  SparseMatrix stiff_v;
  SparseMatrix grad_coupling;

  std::size_t num_vertices() const noexcept { return static_cast<std::size_t>(mass_s.rows()); }
};

FemOperators assemble_operators(const PeriodicMesh& mesh);

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// Load vectors (f, chi_j) using the three-edge-midpoint rule, which is exact
/// for quadratics.
Eigen::VectorXd assemble_load(const PeriodicMesh& mesh, const ScalarFunction& f);
Eigen::VectorXd assemble_load(const PeriodicMesh& mesh, const VectorFunction& f);

/// L2 projection onto the P1 space: solves mass * c = load.
ScalarField l2_project(const ScalarFunction& f, const PeriodicMesh& mesh, const FemOperators& ops,
                       const SolveConfig& cfg = {});
VectorField l2_project(const VectorFunction& f, const PeriodicMesh& mesh, const FemOperators& ops,
                       const SolveConfig& cfg = {});

/// Nodal interpolants.
ScalarField interpolate(const ScalarFunction& f, const PeriodicMesh& mesh);
VectorField interpolate(const VectorFunction& f, const PeriodicMesh& mesh);

double l2_norm(const ScalarField& f, const FemOperators& ops);
double l2_norm(const VectorField& f, const FemOperators& ops);
double h1_seminorm(const ScalarField& f, const FemOperators& ops);
double h1_seminorm(const VectorField& f, const FemOperators& ops);

/// ||u_h - f||_{L2} with a degree-4 six-point rule per triangle.
double l2_error(const PeriodicMesh& mesh, const Eigen::VectorXd& coeffs, const ScalarFunction& f);

/// Discrete mean 1^T M c (the domain has unit area).
double discrete_mean(const Eigen::VectorXd& coeffs, const FemOperators& ops);

/// Subtracts the discrete mean in place and tags the field zero-mean.
void normalize_mean(ScalarField& f, const FemOperators& ops);

/// Applies a scalar operator componentwise to an interleaved vector.
Eigen::VectorXd apply_componentwise(const SparseMatrix& scalar_op, const Eigen::VectorXd& interleaved);

/// P1 interpolation of fields on `from` at the vertices of `to`, as a
/// (to.num_vertices x from.num_vertices) matrix.
SparseMatrix prolongation_matrix(const PeriodicMesh& from, const PeriodicMesh& to);

VectorField prolong(const SparseMatrix& prolongation, const VectorField& f);
ScalarField prolong(const SparseMatrix& prolongation, const ScalarField& f);

}  // namespace chorin

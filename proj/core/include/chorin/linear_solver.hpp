#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cstddef>
#include <memory>

namespace chorin {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class SolverMethod {
  ConjugateGradient,  // Jacobi-preconditioned CG, optionally deflated
  SparseCholesky,     // LDL^T factorization computed once, reused per solve
};

struct SolveConfig {
  double rel_tol = 1e-10;
  std::size_t max_iter = 5000;
  /// Project constants out of rhs and iterates; required for the singular
  /// periodic Laplacian.
  bool deflate_constants = false;
  SolverMethod method = SolverMethod::SparseCholesky;

  /// Throws InvalidArgument unless rel_tol > 0 and max_iter >= 1.
  void validate() const;
};

struct SolveStats {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Tolerance on |1^T b| / max(||b||_1, scale) above which a deflated solve
/// rejects its rhs. `scale` is the l1 size of the terms b was formed from;
/// without it a rhs that is pure cancellation noise would be rejected.
inline constexpr double kDeflationTolerance = 1e-12;

/// Conjugate-gradient solve of a symmetric positive (semi)definite system.
///
/// With `cfg.deflate_constants` the operator may have the constants as its
/// kernel; the rhs must then be orthogonal to them (IncompatibleRhs
/// otherwise) and the returned solution has zero Euclidean mean. Throws
/// MaxIterationsExceeded when rel_tol is not reached in max_iter steps.
Eigen::VectorXd solve_spd(const SparseMatrix& op, const Eigen::VectorXd& rhs,
                          const SolveConfig& cfg, SolveStats* stats = nullptr, double rhs_scale = 0.0);

/// Removes the Euclidean mean of `rhs`, first checking that it was
/// negligible (IncompatibleRhs otherwise).
void deflate_rhs(Eigen::VectorXd& rhs, double scale = 0.0);

/// || |A| |x| ||_1, the scale of the cancellation-free product A x.
double abs_product_norm(const SparseMatrix& a, const Eigen::VectorXd& x);

/// A reusable solver for one fixed operator. Immutable after construction;
/// `solve` is safe to call concurrently.
class SpdSolver {
 public:
  SpdSolver(SparseMatrix op, SolveConfig cfg);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, SolveStats* stats = nullptr, double rhs_scale = 0.0) const;

  const SparseMatrix& op() const noexcept { return op_; }
  const SolveConfig& config() const noexcept { return cfg_; }

 private:
  SparseMatrix op_;
  SolveConfig cfg_;
  // For deflated systems the factorization is of the operator with dof 0
  // pinned (row and column removed).
  std::shared_ptr<const Eigen::SimplicialLDLT<SparseMatrix>> factor_;
};

}  // namespace chorin

#include "chorin/linear_solver.hpp"

#include "chorin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chorin {

void SolveConfig::validate() const {
  if (!(rel_tol > 0.0)) throw InvalidArgument("SolveConfig: rel_tol must be > 0");
  if (max_iter < 1) throw InvalidArgument("SolveConfig: max_iter must be >= 1");
}

void deflate_rhs(Eigen::VectorXd& rhs, double scale) {
  if (rhs.size() == 0) return;
  const double sum = rhs.sum();
  scale = std::max(scale, rhs.lpNorm<1>());
  if (scale > 0.0 && std::abs(sum) > kDeflationTolerance * scale) {
    throw IncompatibleRhs(std::abs(sum) / scale);
  }
  rhs.array() -= sum / static_cast<double>(rhs.size());
}

double abs_product_norm(const SparseMatrix& a, const Eigen::VectorXd& x) {
  if (a.cols() != x.size()) throw DimensionMismatch("abs_product_norm: size mismatch");
  return (a.cwiseAbs() * x.cwiseAbs()).sum();
}

namespace {

void project_out_constants(Eigen::VectorXd& v) { v.array() -= v.mean(); }

}  // namespace

Eigen::VectorXd solve_spd(const SparseMatrix& op, const Eigen::VectorXd& rhs,
                          const SolveConfig& cfg, SolveStats* stats, double rhs_scale) {
  cfg.validate();
  if (op.rows() != op.cols() || op.rows() != rhs.size()) {
    throw DimensionMismatch("solve_spd: operator is " + std::to_string(op.rows()) + "x" +
                            std::to_string(op.cols()) + ", rhs has " +
                            std::to_string(rhs.size()) + " entries");
  }
  const bool deflate = cfg.deflate_constants;
  Eigen::VectorXd b = rhs;
  if (deflate) deflate_rhs(b, rhs_scale);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }

  const Eigen::VectorXd inv_diag = op.diagonal().cwiseInverse();
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  if (deflate) project_out_constants(z);
  Eigen::VectorXd p = z;
  Eigen::VectorXd q(b.size());
  double rz = r.dot(z);
  double res = 1.0;

  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    q.noalias() = op * p;
    const double alpha = rz / p.dot(q);
    x.noalias() += alpha * p;
    r.noalias() -= alpha * q;
    if (deflate) project_out_constants(r);
    res = r.norm() / b_norm;
    if (res <= cfg.rel_tol) {
      if (deflate) project_out_constants(x);
      if (stats) *stats = {it, res};
      return x;
    }
    z = inv_diag.cwiseProduct(r);
    if (deflate) project_out_constants(z);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw MaxIterationsExceeded(cfg.max_iter, res);
}

SpdSolver::SpdSolver(SparseMatrix op, SolveConfig cfg) : op_(std::move(op)), cfg_(cfg) {
  cfg_.validate();
  if (op_.rows() != op_.cols()) throw DimensionMismatch("SpdSolver: operator must be square");
  if (cfg_.method != SolverMethod::SparseCholesky) return;

  auto factor = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>();
  if (cfg_.deflate_constants && op_.rows() > 1) {
    const Eigen::Index n = op_.rows() - 1;
    SparseMatrix pinned = op_.bottomRightCorner(n, n);
    factor->compute(pinned);
  } else if (cfg_.deflate_constants) {
    // A 1x1 singular system: the only zero-mean solution is 0.
    factor_.reset();
    return;
  } else {
    factor->compute(op_);
  }
  if (factor->info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "E_FACTORIZATION", "sparse LDL^T factorization failed");
  }
  factor_ = std::move(factor);
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& rhs, SolveStats* stats, double rhs_scale) const {
  if (cfg_.method == SolverMethod::ConjugateGradient) return solve_spd(op_, rhs, cfg_, stats, rhs_scale);
  if (rhs.size() != op_.rows()) throw DimensionMismatch("SpdSolver: rhs size mismatch");

  if (!cfg_.deflate_constants) {
    Eigen::VectorXd x = factor_->solve(rhs);
    if (stats) *stats = {1, 0.0};
    return x;
  }

  Eigen::VectorXd b = rhs;
  deflate_rhs(b, rhs_scale);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  if (factor_) {
    const Eigen::Index n = b.size() - 1;
    x.tail(n) = factor_->solve(b.tail(n));
    x.array() -= x.mean();
  }
  if (stats) *stats = {1, 0.0};
  return x;
}

}  // namespace chorin

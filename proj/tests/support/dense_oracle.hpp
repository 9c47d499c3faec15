#pragma once

// Independent dense reference implementations used as test oracles. Element
// integrals are evaluated by quadrature on barycentric coordinates obtained
// from a 3x3 solve, not by the closed-form element matrices of the library.

#include <chorin/mesh.hpp>

#include <Eigen/Dense>

#include <array>

namespace chorin::oracle {

struct DenseOperators {
  Eigen::MatrixXd mass;   // scalar
  Eigen::MatrixXd stiff;  // scalar
  Eigen::MatrixXd grad;   // (2n) x n, interleaved rows
};

// Degree-4 Dunavant rule (6 points), weights sum to 1.
inline const std::array<std::array<double, 4>, 6>& dunavant6() {
  static const std::array<std::array<double, 4>, 6> rule{{
      {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
      {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
      {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
      {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
      {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
      {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
  }};
  return rule;
}

inline DenseOperators dense_assemble(const PeriodicMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  DenseOperators d{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(2 * n, n)};
  for (const auto& tri : mesh.triangles()) {
    // Rows of coef give the affine basis functions: chi_a(x) = coef(a,0) x + coef(a,1) y + coef(a,2).
    Eigen::Matrix3d v;
    for (int a = 0; a < 3; ++a) v.row(a) << tri.corners[a][0], tri.corners[a][1], 1.0;
    const Eigen::Matrix3d coef = v.inverse().transpose();
    const Eigen::Vector2d e1(tri.corners[1][0] - tri.corners[0][0], tri.corners[1][1] - tri.corners[0][1]);
    const Eigen::Vector2d e2(tri.corners[2][0] - tri.corners[0][0], tri.corners[2][1] - tri.corners[0][1]);
    const double area = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    for (const auto& q : dunavant6()) {
      const double x = q[0] * tri.corners[0][0] + q[1] * tri.corners[1][0] + q[2] * tri.corners[2][0];
      const double y = q[0] * tri.corners[0][1] + q[1] * tri.corners[1][1] + q[2] * tri.corners[2][1];
      const double w = q[3] * area;
      Eigen::Vector3d phi;
      for (int a = 0; a < 3; ++a) phi[a] = coef(a, 0) * x + coef(a, 1) * y + coef(a, 2);
      for (int a = 0; a < 3; ++a) {
        const auto ia = static_cast<Eigen::Index>(tri.dofs[a]);
        for (int b = 0; b < 3; ++b) {
          const auto ib = static_cast<Eigen::Index>(tri.dofs[b]);
          d.mass(ia, ib) += w * phi[a] * phi[b];
          d.stiff(ia, ib) += w * (coef(a, 0) * coef(b, 0) + coef(a, 1) * coef(b, 1));
          for (int c = 0; c < 2; ++c) d.grad(2 * ia + c, ib) += w * phi[a] * coef(b, c);
        }
      }
    }
  }
  return d;
}

inline Eigen::MatrixXd block_diag2(const Eigen::MatrixXd& s) {
  const Eigen::Index n = s.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (int c = 0; c < 2; ++c) v(2 * i + c, 2 * j + c) = s(i, j);
  return v;
}

}  // namespace chorin::oracle

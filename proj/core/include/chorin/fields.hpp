#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <utility>

namespace chorin {

/// Nodal coefficients of a scalar P1 function on a PeriodicMesh.
struct ScalarField {
  Eigen::VectorXd coeffs;
  bool zero_mean = false;

  ScalarField() = default;
  explicit ScalarField(std::size_t n) : coeffs(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}
  ScalarField(Eigen::VectorXd c, bool zm = false) : coeffs(std::move(c)), zero_mean(zm) {}

  std::size_t size() const noexcept { return static_cast<std::size_t>(coeffs.size()); }
};

/// Nodal coefficients of a vector P1 function, interleaved as
/// (u1 at vertex 0, u2 at vertex 0, u1 at vertex 1, ...).
struct VectorField {
  Eigen::VectorXd coeffs;

  VectorField() = default;
  explicit VectorField(std::size_t num_vertices)
      : coeffs(Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(num_vertices))) {}
  explicit VectorField(Eigen::VectorXd c) : coeffs(std::move(c)) {}

  std::size_t num_vertices() const noexcept { return static_cast<std::size_t>(coeffs.size() / 2); }

  Eigen::VectorXd component(int c) const {
    const Eigen::Index n = coeffs.size() / 2;
    return Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<2>>(coeffs.data() + c, n);
  }

  void set_component(int c, const Eigen::VectorXd& values) {
    const Eigen::Index n = coeffs.size() / 2;
    Eigen::Map<Eigen::VectorXd, 0, Eigen::InnerStride<2>>(coeffs.data() + c, n) = values;
  }

  static VectorField from_components(const Eigen::VectorXd& u1, const Eigen::VectorXd& u2) {
    VectorField f(static_cast<std::size_t>(u1.size()));
    f.set_component(0, u1);
    f.set_component(1, u2);
    return f;
  }
};

}  // namespace chorin

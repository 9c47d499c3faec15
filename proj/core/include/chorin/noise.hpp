#pragma once

#include "chorin/fields.hpp"
#include "chorin/mesh.hpp"

#include <functional>
#include <string>

namespace chorin {

/// Multiplicative noise operator B(u), applied nodally.
struct NoiseModel {
  enum class Kind { SqrtPlusOne, Zero, Custom };

  Kind kind = Kind::Zero;
  /// Coefficient c of B(u) = c (sqrt(u1^2 + 1), sqrt(u2^2 + 1)).
  double coefficient = 0.0;
  std::function<Vec2(const Vec2&)> custom;

  static NoiseModel zero() { return {}; }
  static NoiseModel sqrt_plus_one(double c) { return {Kind::SqrtPlusOne, c, {}}; }
  static NoiseModel from_function(std::function<Vec2(const Vec2&)> f) {
    return {Kind::Custom, 0.0, std::move(f)};
  }

  bool is_zero() const noexcept { return kind == Kind::Zero; }
  std::string describe() const;
};

VectorField evaluate_noise(const NoiseModel& model, const VectorField& u);

/// Nodal product B(u) * dW used as the stochastic load.
VectorField noise_load(const NoiseModel& model, const VectorField& u, const ScalarField& dW);

}  // namespace chorin

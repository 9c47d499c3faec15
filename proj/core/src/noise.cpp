#include "chorin/noise.hpp"

#include "chorin/errors.hpp"

#include <cmath>
#include <sstream>

namespace chorin {

std::string NoiseModel::describe() const {
  switch (kind) {
    case Kind::Zero:
      return "zero";
    case Kind::Custom:
      return "custom";
    case Kind::SqrtPlusOne: {
      std::ostringstream s;
      s << "sqrt_plus_one(" << coefficient << ")";
      return s.str();
    }
  }
  return "unknown";
}

VectorField evaluate_noise(const NoiseModel& model, const VectorField& u) {
  VectorField out(u.num_vertices());
  switch (model.kind) {
    case NoiseModel::Kind::Zero:
      break;
    case NoiseModel::Kind::SqrtPlusOne:
      out.coeffs = model.coefficient * (u.coeffs.array().square() + 1.0).sqrt();
      break;
    case NoiseModel::Kind::Custom:
      if (!model.custom) throw InvalidArgument("evaluate_noise: custom model without a function");
      for (std::size_t v = 0; v < u.num_vertices(); ++v) {
        const auto i = static_cast<Eigen::Index>(2 * v);
        const Vec2 b = model.custom({u.coeffs[i], u.coeffs[i + 1]});
        out.coeffs[i] = b[0];
        out.coeffs[i + 1] = b[1];
      }
      break;
  }
  return out;
}

VectorField noise_load(const NoiseModel& model, const VectorField& u, const ScalarField& dW) {
  if (dW.size() != u.num_vertices()) throw DimensionMismatch("noise_load: dW and u live on different meshes");
  VectorField out = evaluate_noise(model, u);
  if (model.is_zero()) return out;
  Eigen::Map<Eigen::Matrix<double, 2, Eigen::Dynamic>> b(out.coeffs.data(), 2, dW.coeffs.size());
  b.array().rowwise() *= dW.coeffs.transpose().array();
  return out;
}

}  // namespace chorin

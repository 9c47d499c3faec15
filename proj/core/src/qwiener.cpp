#include "chorin/qwiener.hpp"

#include "chorin/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace chorin {

double QWienerMode::eigenfunction(const Vec2& x) const {
  // ||sin(j pi x1) sin(l pi x2)||_{L2(0,1)^2} = 1/2
  return 2.0 * std::sin(j * std::numbers::pi * x[0]) * std::sin(l * std::numbers::pi * x[1]);
}

QWienerSpec build_qwiener_spec(int truncation) {
  if (truncation < 1) throw InvalidArgument("build_qwiener_spec: J must be >= 1");
  QWienerSpec spec;
  spec.truncation = truncation;
  constexpr double g_norm = 0.5;
  for (int j = 1; j <= truncation; ++j) {
    for (int l = 1; l <= truncation; ++l) {
      const double s = static_cast<double>(j + l);
      spec.modes.push_back({j, l, g_norm / (s * s)});
    }
  }
  return spec;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return mix64(master_seed ^ mix64(index));
}

double NormalStream::uniform_open() {
  // (w >> 11) in [0, 2^53); the half offset keeps the result in (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

namespace {

// Increments are rounded to integer multiples of 2^-48. Any partial sum with
// magnitude below 2^5 is then exactly representable, so coarsening is exact
// and independent of grouping.
double quantize_increment(double x) { return std::ldexp(std::nearbyint(std::ldexp(x, 48)), -48); }

}  // namespace

BrownianPath sample_brownian_path(const QWienerSpec& spec, std::size_t fine_steps, std::uint64_t seed,
                                  double final_time, IncrementScaling scaling) {
  if (fine_steps < 1) throw InvalidArgument("sample_brownian_path: m0 must be >= 1");
  if (!(final_time > 0.0)) throw InvalidArgument("sample_brownian_path: T must be > 0");

  BrownianPath path;
  path.fine_steps = fine_steps;
  path.fine_step = final_time / static_cast<double>(fine_steps);
  path.seed = seed;

  const auto rows = static_cast<Eigen::Index>(fine_steps);
  const auto cols = static_cast<Eigen::Index>(spec.num_modes());
  path.increments.resize(rows, cols);

  const double step_factor =
      scaling == IncrementScaling::SqrtStep ? std::sqrt(path.fine_step) : path.fine_step;
  Eigen::VectorXd amplitude(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    amplitude[c] = step_factor * std::sqrt(spec.modes[static_cast<std::size_t>(c)].eigenvalue);
  }

  NormalStream normals(seed);
  for (Eigen::Index m = 0; m < rows; ++m) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      path.increments(m, c) = quantize_increment(amplitude[c] * normals.next());
    }
  }
  return path;
}

IncrementTable coarsen_increments(const IncrementTable& fine, std::size_t factor) {
  const auto rows = static_cast<std::size_t>(fine.rows());
  if (factor == 0 || rows % factor != 0) {
    throw NonDivisibleFactor("coarsen_increments: factor " + std::to_string(factor) +
                             " does not divide " + std::to_string(rows) + " fine steps");
  }
  const auto r = static_cast<Eigen::Index>(factor);
  IncrementTable coarse = IncrementTable::Zero(fine.rows() / r, fine.cols());
  for (Eigen::Index m = 0; m < coarse.rows(); ++m) {
    for (Eigen::Index f = m * r; f < (m + 1) * r; ++f) coarse.row(m) += fine.row(f);
  }
  return coarse;
}

IncrementTable coarsen_increments(const BrownianPath& path, std::size_t factor) {
  return coarsen_increments(path.increments, factor);
}

ModeBasis::ModeBasis(const QWienerSpec& spec, const PeriodicMesh& mesh)
    : values_(static_cast<Eigen::Index>(mesh.num_vertices()), static_cast<Eigen::Index>(spec.num_modes())) {
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    for (std::size_t c = 0; c < spec.num_modes(); ++c) {
      values_(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(c)) =
          spec.modes[c].eigenfunction(mesh.vertices()[v]);
    }
  }
}

ScalarField increment_field(const ModeBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& increments) {
  if (static_cast<std::size_t>(increments.size()) != basis.num_modes()) {
    throw DimensionMismatch("increment_field: " + std::to_string(increments.size()) + " increments for " +
                            std::to_string(basis.num_modes()) + " modes");
  }
  return ScalarField(basis.values() * increments);
}

ScalarField increment_field(const QWienerSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& increments,
                            const PeriodicMesh& mesh) {
  return increment_field(ModeBasis(spec, mesh), increments);
}

std::string path_to_csv(const QWienerSpec& spec, const BrownianPath& path) {
  std::ostringstream out;
  out.precision(17);
  out << "m";
  for (const auto& mode : spec.modes) out << ",j" << mode.j << "_l" << mode.l;
  out << '\n';
  for (Eigen::Index m = 0; m < path.increments.rows(); ++m) {
    out << m;
    for (Eigen::Index c = 0; c < path.increments.cols(); ++c) out << ',' << path.increments(m, c);
    out << '\n';
  }
  return out.str();
}

}  // namespace chorin

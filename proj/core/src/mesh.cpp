#include "chorin/mesh.hpp"

#include "chorin/errors.hpp"

namespace chorin {

PeriodicMesh::PeriodicMesh(std::size_t n_cells) : n_(n_cells) {
  if (n_cells == 0) {
    throw InvalidArgument("PeriodicMesh: n_cells must be >= 1");
  }
  const double h = 1.0 / static_cast<double>(n_);
  vertices_.reserve(n_ * n_);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) {
      vertices_.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h});
    }
  }

  triangles_.reserve(2 * n_ * n_);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) {
      const long ii = static_cast<long>(i);
      const long jj = static_cast<long>(j);
      const Vec2 p00{static_cast<double>(i) * h, static_cast<double>(j) * h};
      const Vec2 p10{static_cast<double>(i + 1) * h, static_cast<double>(j) * h};
      const Vec2 p11{static_cast<double>(i + 1) * h, static_cast<double>(j + 1) * h};
      const Vec2 p01{static_cast<double>(i) * h, static_cast<double>(j + 1) * h};
      const std::size_t d00 = periodic_map(ii, jj);
      const std::size_t d10 = periodic_map(ii + 1, jj);
      const std::size_t d11 = periodic_map(ii + 1, jj + 1);
      const std::size_t d01 = periodic_map(ii, jj + 1);
      triangles_.push_back({{d00, d10, d11}, {p00, p10, p11}});
      triangles_.push_back({{d00, d11, d01}, {p00, p11, p01}});
    }
  }
}

std::size_t PeriodicMesh::periodic_map(long i, long j) const noexcept {
  const long n = static_cast<long>(n_);
  const long iw = ((i % n) + n) % n;
  const long jw = ((j % n) + n) % n;
  return static_cast<std::size_t>(iw + n * jw);
}

std::vector<std::size_t> PeriodicMesh::valence() const {
  std::vector<std::size_t> count(num_vertices(), 0);
  for (const auto& t : triangles_) {
    for (auto d : t.dofs) ++count[d];
  }
  return count;
}

double signed_area(const std::array<Vec2, 3>& c) noexcept {
  return 0.5 * ((c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) -
                (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]));
}

}  // namespace chorin

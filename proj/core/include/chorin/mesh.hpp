#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace chorin {

using Vec2 = std::array<double, 2>;

/// Uniform triangulation of the periodic unit square (0,1)^2.
///
/// Cell (i, j) is split along its (i,j)->(i+1,j+1) diagonal into a lower
/// triangle (i,j),(i+1,j),(i+1,j+1) and an upper triangle
/// (i,j),(i+1,j+1),(i,j+1). Both are counter-clockwise. Grid index (i, j)
/// maps to the periodic dof i mod N + N * (j mod N).
class PeriodicMesh {
 public:
  /// Geometry of one triangle in unwrapped coordinates; corners of the
  /// upper-right cell boundary sit at x = 1 rather than wrapping to 0.
  struct Triangle {
    std::array<std::size_t, 3> dofs;
    std::array<Vec2, 3> corners;
  };

  explicit PeriodicMesh(std::size_t n_cells);

  std::size_t n_cells() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / static_cast<double>(n_); }
  std::size_t num_vertices() const noexcept { return n_ * n_; }
  std::size_t num_triangles() const noexcept { return triangles_.size(); }

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }

  /// Periodic dof index of geometric grid point (i, j); any integers allowed.
  std::size_t periodic_map(long i, long j) const noexcept;

  /// Number of triangle incidences per dof (6 on this grid for N >= 1).
  std::vector<std::size_t> valence() const;

 private:
  std::size_t n_;
  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
};

/// Signed area of a triangle given its three corners.
double signed_area(const std::array<Vec2, 3>& corners) noexcept;

}  // namespace chorin

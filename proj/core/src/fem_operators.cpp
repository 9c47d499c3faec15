#include "chorin/fem_operators.hpp"

#include "chorin/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace chorin {

namespace {

using Triplet = Eigen::Triplet<double>;

/// Constant gradients of the three barycentric basis functions.
std::array<Vec2, 3> basis_gradients(const std::array<Vec2, 3>& c, double area) {
  std::array<Vec2, 3> g{};
  for (int a = 0; a < 3; ++a) {
    const Vec2& p = c[(a + 1) % 3];
    const Vec2& q = c[(a + 2) % 3];
    g[a] = {(p[1] - q[1]) / (2.0 * area), (q[0] - p[0]) / (2.0 * area)};
  }
  return g;
}

SparseMatrix block_diagonal(const SparseMatrix& s) {
  std::vector<Triplet> trips;
  trips.reserve(2 * static_cast<std::size_t>(s.nonZeros()));
  for (int k = 0; k < s.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
      for (int c = 0; c < 2; ++c) {
        trips.emplace_back(2 * it.row() + c, 2 * it.col() + c, it.value());
      }
    }
  }
  SparseMatrix v(2 * s.rows(), 2 * s.cols());
  v.setFromTriplets(trips.begin(), trips.end());
  return v;
}

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": got " + std::to_string(got) + " coefficients, expected " +
                            std::to_string(want));
  }
}

}  // namespace

FemOperators assemble_operators(const PeriodicMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<Triplet> mass, stiff, grad;
  mass.reserve(9 * mesh.num_triangles());
  stiff.reserve(9 * mesh.num_triangles());
  grad.reserve(18 * mesh.num_triangles());

  for (const auto& tri : mesh.triangles()) {
    const double area = signed_area(tri.corners);
    const auto g = basis_gradients(tri.corners, area);
    for (int a = 0; a < 3; ++a) {
      const auto ia = static_cast<Eigen::Index>(tri.dofs[a]);
      for (int b = 0; b < 3; ++b) {
        const auto ib = static_cast<Eigen::Index>(tri.dofs[b]);
        mass.emplace_back(ia, ib, area / 12.0 * (a == b ? 2.0 : 1.0));
        stiff.emplace_back(ia, ib, area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]));
        // (d_c chi_b, phi_a) = d_c chi_b * area / 3
        for (int c = 0; c < 2; ++c) grad.emplace_back(2 * ia + c, ib, g[b][c] * area / 3.0);
      }
    }
  }

  FemOperators ops;
  ops.mass_s.resize(n, n);
  ops.mass_s.setFromTriplets(mass.begin(), mass.end());
  ops.stiff_s.resize(n, n);
  ops.stiff_s.setFromTriplets(stiff.begin(), stiff.end());
  ops.grad_coupling.resize(2 * n, n);
  ops.grad_coupling.setFromTriplets(grad.begin(), grad.end());
  ops.mass_v = block_diagonal(ops.mass_s);
  ops.stiff_v = block_diagonal(ops.stiff_s);
  return ops;
}

Eigen::VectorXd assemble_load(const PeriodicMesh& mesh, const ScalarFunction& f) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (const auto& tri : mesh.triangles()) {
    const double area = signed_area(tri.corners);
    for (int e = 0; e < 3; ++e) {
      // Midpoint of the edge opposite corner e; there chi_e = 0 and the
      // other two basis functions equal 1/2.
      const Vec2& p = tri.corners[(e + 1) % 3];
      const Vec2& q = tri.corners[(e + 2) % 3];
      const double w = f({0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])}) * area / 3.0;
      load[static_cast<Eigen::Index>(tri.dofs[(e + 1) % 3])] += 0.5 * w;
      load[static_cast<Eigen::Index>(tri.dofs[(e + 2) % 3])] += 0.5 * w;
    }
  }
  return load;
}

Eigen::VectorXd assemble_load(const PeriodicMesh& mesh, const VectorFunction& f) {
  const Eigen::VectorXd l1 = assemble_load(mesh, [&](const Vec2& x) { return f(x)[0]; });
  const Eigen::VectorXd l2 = assemble_load(mesh, [&](const Vec2& x) { return f(x)[1]; });
  return VectorField::from_components(l1, l2).coeffs;
}

ScalarField l2_project(const ScalarFunction& f, const PeriodicMesh& mesh, const FemOperators& ops,
                       const SolveConfig& cfg) {
  SolveConfig mass_cfg = cfg;
  mass_cfg.deflate_constants = false;
  return ScalarField(solve_spd(ops.mass_s, assemble_load(mesh, f), mass_cfg));
}

VectorField l2_project(const VectorFunction& f, const PeriodicMesh& mesh, const FemOperators& ops,
                       const SolveConfig& cfg) {
  SolveConfig mass_cfg = cfg;
  mass_cfg.deflate_constants = false;
  const Eigen::VectorXd u1 =
      solve_spd(ops.mass_s, assemble_load(mesh, [&](const Vec2& x) { return f(x)[0]; }), mass_cfg);
  const Eigen::VectorXd u2 =
      solve_spd(ops.mass_s, assemble_load(mesh, [&](const Vec2& x) { return f(x)[1]; }), mass_cfg);
  return VectorField::from_components(u1, u2);
}

ScalarField interpolate(const ScalarFunction& f, const PeriodicMesh& mesh) {
  ScalarField out(mesh.num_vertices());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    out.coeffs[static_cast<Eigen::Index>(v)] = f(mesh.vertices()[v]);
  }
  return out;
}

VectorField interpolate(const VectorFunction& f, const PeriodicMesh& mesh) {
  VectorField out(mesh.num_vertices());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2 val = f(mesh.vertices()[v]);
    out.coeffs[static_cast<Eigen::Index>(2 * v)] = val[0];
    out.coeffs[static_cast<Eigen::Index>(2 * v + 1)] = val[1];
  }
  return out;
}

double l2_norm(const ScalarField& f, const FemOperators& ops) {
  check_size(f.size(), ops.num_vertices(), "l2_norm");
  return std::sqrt(std::max(0.0, f.coeffs.dot(ops.mass_s * f.coeffs)));
}

double l2_norm(const VectorField& f, const FemOperators& ops) {
  check_size(f.num_vertices(), ops.num_vertices(), "l2_norm");
  return std::sqrt(std::max(0.0, f.coeffs.dot(ops.mass_v * f.coeffs)));
}

double h1_seminorm(const ScalarField& f, const FemOperators& ops) {
  check_size(f.size(), ops.num_vertices(), "h1_seminorm");
  return std::sqrt(std::max(0.0, f.coeffs.dot(ops.stiff_s * f.coeffs)));
}

double h1_seminorm(const VectorField& f, const FemOperators& ops) {
  check_size(f.num_vertices(), ops.num_vertices(), "h1_seminorm");
  return std::sqrt(std::max(0.0, f.coeffs.dot(ops.stiff_v * f.coeffs)));
}

double l2_error(const PeriodicMesh& mesh, const Eigen::VectorXd& coeffs, const ScalarFunction& f) {
  check_size(static_cast<std::size_t>(coeffs.size()), mesh.num_vertices(), "l2_error");
  // Six-point degree-4 rule: barycentric (a, a, 1 - 2a) and permutations.
  constexpr std::array<double, 2> a = {0.445948490915965, 0.091576213509771};
  constexpr std::array<double, 2> w = {0.223381589678011, 0.109951743655322};
  double sum = 0.0;
  for (const auto& tri : mesh.triangles()) {
    const double area = signed_area(tri.corners);
    for (int g = 0; g < 2; ++g) {
      const double b = 1.0 - 2.0 * a[g];
      const std::array<std::array<double, 3>, 3> bary = {{{a[g], a[g], b}, {a[g], b, a[g]}, {b, a[g], a[g]}}};
      for (const auto& lam : bary) {
        Vec2 x{0.0, 0.0};
        double uh = 0.0;
        for (int v = 0; v < 3; ++v) {
          x[0] += lam[v] * tri.corners[v][0];
          x[1] += lam[v] * tri.corners[v][1];
          uh += lam[v] * coeffs[static_cast<Eigen::Index>(tri.dofs[v])];
        }
        const double d = uh - f(x);
        sum += w[g] * area * d * d;
      }
    }
  }
  return std::sqrt(sum);
}

double discrete_mean(const Eigen::VectorXd& coeffs, const FemOperators& ops) {
  check_size(static_cast<std::size_t>(coeffs.size()), ops.num_vertices(), "discrete_mean");
  return (ops.mass_s * coeffs).sum();
}

void normalize_mean(ScalarField& f, const FemOperators& ops) {
  f.coeffs.array() -= discrete_mean(f.coeffs, ops);
  f.zero_mean = true;
}

Eigen::VectorXd apply_componentwise(const SparseMatrix& scalar_op, const Eigen::VectorXd& interleaved) {
  const Eigen::Index n = interleaved.size() / 2;
  Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic>> in(interleaved.data(), 2, n);
  Eigen::VectorXd out(2 * scalar_op.rows());
  Eigen::Map<Eigen::Matrix<double, 2, Eigen::Dynamic>> res(out.data(), 2, scalar_op.rows());
  res = (scalar_op * in.transpose()).transpose();
  return out;
}

SparseMatrix prolongation_matrix(const PeriodicMesh& from, const PeriodicMesh& to) {
  const auto nc = static_cast<double>(from.n_cells());
  std::vector<Triplet> trips;
  trips.reserve(3 * to.num_vertices());
  for (std::size_t v = 0; v < to.num_vertices(); ++v) {
    const Vec2& x = to.vertices()[v];
    const double sx = x[0] * nc;
    const double sy = x[1] * nc;
    auto i = static_cast<long>(std::floor(sx));
    auto j = static_cast<long>(std::floor(sy));
    double s = sx - static_cast<double>(i);
    double t = sy - static_cast<double>(j);
    // Snap values within rounding of a grid line so nested meshes reproduce
    // coarse nodal values exactly.
    constexpr double snap = 1e-12;
    if (s > 1.0 - snap) { s = 0.0; ++i; }
    if (t > 1.0 - snap) { t = 0.0; ++j; }
    if (s < snap) s = 0.0;
    if (t < snap) t = 0.0;

    const auto row = static_cast<Eigen::Index>(v);
    auto add = [&](long di, long dj, double w) {
      if (w != 0.0) trips.emplace_back(row, static_cast<Eigen::Index>(from.periodic_map(i + di, j + dj)), w);
    };
    if (s >= t) {
      add(0, 0, 1.0 - s);
      add(1, 0, s - t);
      add(1, 1, t);
    } else {
      add(0, 0, 1.0 - t);
      add(1, 1, s);
      add(0, 1, t - s);
    }
  }
  SparseMatrix p(static_cast<Eigen::Index>(to.num_vertices()), static_cast<Eigen::Index>(from.num_vertices()));
  p.setFromTriplets(trips.begin(), trips.end());
  return p;
}

VectorField prolong(const SparseMatrix& prolongation, const VectorField& f) {
  check_size(f.num_vertices(), static_cast<std::size_t>(prolongation.cols()), "prolong");
  return VectorField(apply_componentwise(prolongation, f.coeffs));
}

ScalarField prolong(const SparseMatrix& prolongation, const ScalarField& f) {
  check_size(f.size(), static_cast<std::size_t>(prolongation.cols()), "prolong");
  return ScalarField(prolongation * f.coeffs, false);
}

}  // namespace chorin

#include "chorin/validation.hpp"

#include "chorin/chorin_scheme.hpp"
#include "chorin/errors.hpp"
#include "chorin/fem_operators.hpp"
#include "chorin/helmholtz.hpp"
#include "chorin/qwiener.hpp"
#include "chorin/error_norms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>

namespace chorin {

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXd random_vector(NormalStream& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.next();
  return v;
}

CheckResult upper_bound(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

double max_abs_asymmetry(const SparseMatrix& a) {
  const SparseMatrix d = a - SparseMatrix(a.transpose());
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

/// -sum_K int_K div(v_h) q_h, computed element by element.
double elementwise_div_pairing(const PeriodicMesh& mesh, const VectorField& v, const ScalarField& q) {
  double sum = 0.0;
  for (const auto& tri : mesh.triangles()) {
    const auto& c = tri.corners;
    const double area = signed_area(c);
    double div = 0.0;
    double q_int = 0.0;
    for (int a = 0; a < 3; ++a) {
      const Vec2& p = c[(a + 1) % 3];
      const Vec2& r = c[(a + 2) % 3];
      const double gx = (p[1] - r[1]) / (2.0 * area);
      const double gy = (r[0] - p[0]) / (2.0 * area);
      const auto d = static_cast<Eigen::Index>(tri.dofs[a]);
      div += v.coeffs[2 * d] * gx + v.coeffs[2 * d + 1] * gy;
      q_int += q.coeffs[d] * area / 3.0;
    }
    sum -= div * q_int;
  }
  return sum;
}

void check_operators(ValidationReport& report, NormalStream& rng) {
  double unity = 0.0, kernel = 0.0, asym = 0.0;
  for (std::size_t n : {1, 2, 8, 32}) {
    const PeriodicMesh mesh(n);
    const auto ops = assemble_operators(mesh);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(mesh.num_vertices()));
    unity = std::max(unity, std::abs(ones.dot(ops.mass_s * ones) - 1.0));
    kernel = std::max(kernel, (ops.stiff_s * ones).lpNorm<Eigen::Infinity>());
    kernel = std::max(kernel, (ops.grad_coupling * ones).lpNorm<Eigen::Infinity>());
    asym = std::max({asym, max_abs_asymmetry(ops.mass_s), max_abs_asymmetry(ops.stiff_s)});
  }
  report.checks.push_back(upper_bound("mass_partition_of_unity", unity, 1e-14, "|1^T M 1 - 1|, N in {1,2,8,32}"));
  report.checks.push_back(upper_bound("stiffness_kernel", kernel, 1e-14, "||K 1||_inf and ||G 1||_inf"));
  report.checks.push_back(upper_bound("operator_symmetry", asym, 0.0, "max |A - A^T| for mass and stiffness"));

  {
    const PeriodicMesh mesh(2);
    const auto ops = assemble_operators(mesh);
    double dev = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) dev = std::max(dev, std::abs(ops.mass_s.coeff(i, i) - 0.125));
    report.checks.push_back(upper_bound("mass_diagonal_n2", dev, 1e-15, "diag(M) = h^2/2 on N = 2"));
  }

  {
    const PeriodicMesh mesh(8);
    const auto ops = assemble_operators(mesh);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const VectorField v(random_vector(rng, 2 * 64));
      const ScalarField q(random_vector(rng, 64));
      const double assembled = v.coeffs.dot(ops.grad_coupling * q.coeffs);
      const double direct = elementwise_div_pairing(mesh, v, q);
      const double scale = std::max(1.0, std::abs(direct));
      worst = std::max(worst, std::abs(assembled - direct) / scale);
    }
    report.checks.push_back(upper_bound("integration_by_parts", worst, 1e-12, "v^T G q = -(div v, q) on N = 8"));
  }
}

void check_poisson(ValidationReport& report) {
  std::vector<std::pair<double, double>> pts;
  SolveConfig cfg;
  cfg.method = SolverMethod::ConjugateGradient;
  cfg.deflate_constants = true;
  cfg.rel_tol = 1e-12;
  const auto exact = [](const Vec2& x) { return std::sin(kTwoPi * x[0]) / (kTwoPi * kTwoPi); };
  for (std::size_t n : {8, 16, 32, 64}) {
    const PeriodicMesh mesh(n);
    const auto ops = assemble_operators(mesh);
    const Eigen::VectorXd load = assemble_load(mesh, [](const Vec2& x) { return std::sin(kTwoPi * x[0]); });
    const Eigen::VectorXd x = solve_spd(ops.stiff_s, load, cfg);
    pts.emplace_back(mesh.h(), l2_error(mesh, x, exact));
  }
  const double slope = fit_rate(pts).slope;
  report.checks.push_back({"poisson_convergence_slope", std::abs(slope - 2.0) <= 0.2, slope, 0.2,
                           "fitted L2 slope over N in {8,16,32,64}, required 2.0 +- 0.2"});
}

void check_helmholtz(ValidationReport& report, NormalStream& rng) {
  const SpaceDiscretization space(8, SolveConfig{});
  double orth = 0.0, idem = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const VectorField load(random_vector(rng, 2 * 64));
    const auto first = helmholtz_decompose(space.ops, load, space.laplace);
    orth = std::max(orth, orthogonality_residual(space.ops, ElementwiseVectorField::from_nodal(load), first));
    const auto second = helmholtz_decompose(space.ops, first.projected_load, space.laplace);
    idem = std::max(idem, l2_norm(second.potential, space.ops) / std::max(1.0, l2_norm(first.potential, space.ops)));
  }
  report.checks.push_back(upper_bound("helmholtz_orthogonality", orth, 1e-9, "(eta, grad phi) residual, N = 8"));
  report.checks.push_back(upper_bound("helmholtz_idempotence", idem, 1e-9, "potential of a re-decomposition"));
}

void check_coupling(ValidationReport& report, std::uint64_t seed) {
  const auto spec = build_qwiener_spec(2);
  const auto path = sample_brownian_path(spec, 256, seed);
  const IncrementTable two_then_four = coarsen_increments(coarsen_increments(path, 2), 4);
  const IncrementTable eight = coarsen_increments(path, 8);
  const IncrementTable all = coarsen_increments(path, 256);
  const IncrementTable all_via = coarsen_increments(eight, 32);
  const bool exact = (two_then_four.array() == eight.array()).all() && (all.array() == all_via.array()).all();
  report.checks.push_back({"increment_coarsening_exact", exact, exact ? 0.0 : 1.0, 0.0,
                           "coarsen(2) o coarsen(4) == coarsen(8) and column sums, bit for bit"});
}

SchemeConfig scheme(SchemeVariant variant, std::size_t steps, NoiseModel noise, Vec2 forcing) {
  SchemeConfig cfg;
  cfg.steps = steps;
  cfg.variant = variant;
  cfg.noise = std::move(noise);
  cfg.forcing = forcing;
  return cfg;
}

void check_divergence_identity(ValidationReport& report, std::uint64_t seed) {
  auto space = std::make_shared<const SpaceDiscretization>(8, SolveConfig{});
  const auto qspec = build_qwiener_spec(2);
  const ModeBasis basis(qspec, space->mesh);
  const auto path = sample_brownian_path(qspec, 64, seed);
  for (auto variant : {SchemeVariant::Standard, SchemeVariant::Modified}) {
    const ChorinStepper stepper(space, scheme(variant, 64, NoiseModel::sqrt_plus_one(10.0), {1.0, 1.0}));
    auto state = ChorinState::initial(VectorField(space->mesh.num_vertices()));
    double worst = 0.0;
    for (Eigen::Index m = 0; m < 64; ++m) {
      stepper.advance(state, increment_field(basis, path.increments.row(m).transpose()));
      worst = std::max(worst, divergence_residual(space->ops, state.u_tilde, state.pressure, stepper.step()));
    }
    report.checks.push_back(upper_bound(std::string("divergence_identity_") + to_string(variant), worst, 1e-9,
                                        "64 steps, N = 8, B = 10 sqrt(u^2+1)"));
  }
}

void check_energy(ValidationReport& report, NormalStream& rng) {
  auto space = std::make_shared<const SpaceDiscretization>(8, SolveConfig{});
  const ChorinStepper stepper(space, scheme(SchemeVariant::Standard, 32, NoiseModel::zero(), {0.0, 0.0}));
  auto state = ChorinState::initial(VectorField(random_vector(rng, 2 * 64)));
  const ScalarField dW(space->mesh.num_vertices());
  double worst = -1.0;
  double prev = l2_norm(state.u_tilde, space->ops);
  for (int m = 0; m < 32; ++m) {
    stepper.advance(state, dW);
    const double now = l2_norm(state.u_tilde, space->ops);
    worst = std::max(worst, (now - prev) / prev);
    prev = now;
  }
  report.checks.push_back(upper_bound("zero_noise_energy_monotone", worst, 1e-12,
                                      "max relative increase of ||u~^n|| with f = 0, B = 0"));
}

bool identical_records(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  if (a.checkpoints.size() != b.checkpoints.size()) return false;
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    const auto& x = a.checkpoints[i];
    const auto& y = b.checkpoints[i];
    if (!(x.u_tilde.coeffs.array() == y.u_tilde.coeffs.array()).all()) return false;
    if (!(x.recovered_pressure.coeffs.array() == y.recovered_pressure.coeffs.array()).all()) return false;
    if (!(x.p_time_integral.coeffs.array() == y.p_time_integral.coeffs.array()).all()) return false;
  }
  return true;
}

void check_zero_noise(ValidationReport& report, std::uint64_t seed) {
  auto space = std::make_shared<const SpaceDiscretization>(8, SolveConfig{});
  const auto qspec = build_qwiener_spec(2);
  const ModeBasis basis(qspec, space->mesh);
  const auto steps = all_steps(16);
  const VectorField u0(space->mesh.num_vertices());
  const ChorinStepper standard(space, scheme(SchemeVariant::Standard, 16, NoiseModel::zero(), {1.0, 1.0}));
  const ChorinStepper modified(space, scheme(SchemeVariant::Modified, 16, NoiseModel::zero(), {1.0, 1.0}));
  const auto path_a = sample_brownian_path(qspec, 16, seed);
  const auto path_b = sample_brownian_path(qspec, 16, seed + 1);
  const auto a = run_trajectory(standard, basis, path_a.increments, u0, std::span<const std::size_t>(steps));
  const auto b = run_trajectory(standard, basis, path_b.increments, u0, std::span<const std::size_t>(steps));
  const auto c = run_trajectory(modified, basis, path_a.increments, u0, std::span<const std::size_t>(steps));
  const bool det = identical_records(a, b);
  const bool same = identical_records(a, c);
  report.checks.push_back({"zero_noise_determinism", det, det ? 0.0 : 1.0, 0.0, "two seeds, B = 0, f = (1,1)"});
  report.checks.push_back(
      {"modified_equals_standard_zero_noise", same, same ? 0.0 : 1.0, 0.0, "bit-identical trajectories"});
}

}  // namespace

ValidationReport run_invariant_suite(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  ValidationReport report;
  NormalStream rng(seed);
  auto guarded = [&](const char* name, const std::function<void()>& check) {
    try {
      check();
    } catch (const std::exception& e) {
      report.checks.push_back({name, false, 0.0, 0.0, std::string("threw: ") + e.what()});
    }
  };
  guarded("operators", [&] { check_operators(report, rng); });
  guarded("poisson_convergence_slope", [&] { check_poisson(report); });
  guarded("helmholtz", [&] { check_helmholtz(report, rng); });
  guarded("increment_coarsening_exact", [&] { check_coupling(report, seed); });
  guarded("divergence_identity", [&] { check_divergence_identity(report, seed); });
  guarded("zero_noise_energy_monotone", [&] { check_energy(report, rng); });
  guarded("zero_noise", [&] { check_zero_noise(report, seed); });
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace chorin

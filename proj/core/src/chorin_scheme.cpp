#include "chorin/chorin_scheme.hpp"

#include "chorin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chorin {

const char* to_string(SchemeVariant v) noexcept {
  return v == SchemeVariant::Standard ? "standard" : "modified";
}

namespace {

SolveConfig deflated(SolveConfig cfg) {
  cfg.deflate_constants = true;
  return cfg;
}

SolveConfig non_deflated(SolveConfig cfg) {
  cfg.deflate_constants = false;
  return cfg;
}

}  // namespace

SpaceDiscretization::SpaceDiscretization(std::size_t n_cells, const SolveConfig& cfg)
    : mesh(n_cells), ops(assemble_operators(mesh)), laplace(ops.stiff_s, deflated(cfg)) {}

void SchemeConfig::validate() const {
  if (!(final_time > 0.0)) throw InvalidArgument("SchemeConfig: T must be > 0");
  if (steps < 1) throw InvalidArgument("SchemeConfig: M must be >= 1");
  if (!(nu > 0.0)) throw InvalidArgument("SchemeConfig: nu must be > 0");
  solve_cfg.validate();
}

ChorinState ChorinState::initial(const VectorField& u0) {
  ChorinState s;
  const std::size_t n = u0.num_vertices();
  s.u_tilde = u0;
  s.pressure = ScalarField(n);
  s.pressure.zero_mean = true;
  s.recovered_pressure = s.pressure;
  s.p_time_integral = s.pressure;
  s.r_time_integral = s.pressure;
  return s;
}

ChorinStepper::ChorinStepper(std::shared_ptr<const SpaceDiscretization> space, SchemeConfig cfg)
    : space_(std::move(space)),
      cfg_(std::move(cfg)),
      k_(cfg_.step()),
      momentum_((cfg_.validate(), SparseMatrix(space_->ops.mass_s + (k_ * cfg_.nu) * space_->ops.stiff_s)),
                non_deflated(cfg_.solve_cfg)) {
  const std::size_t n = space_->mesh.num_vertices();
  VectorField f(n);
  for (std::size_t v = 0; v < n; ++v) {
    f.coeffs[static_cast<Eigen::Index>(2 * v)] = cfg_.forcing[0];
    f.coeffs[static_cast<Eigen::Index>(2 * v + 1)] = cfg_.forcing[1];
  }
  constant_forcing_moments_ = space_->ops.mass_v * f.coeffs;
}

Eigen::VectorXd ChorinStepper::forcing_moments(double t) const {
  if (!cfg_.forcing_callback) return constant_forcing_moments_;
  const auto f = interpolate([&](const Vec2& x) { return cfg_.forcing_callback(t, x); }, space_->mesh);
  return space_->ops.mass_v * f.coeffs;
}

void ChorinStepper::advance(ChorinState& state, const ScalarField& dW) const {
  if (cfg_.variant == SchemeVariant::Standard) {
    standard_step(state, dW);
  } else {
    modified_step(state, dW);
  }
}

void ChorinStepper::standard_step(ChorinState& state, const ScalarField& dW) const {
  const auto load = ElementwiseVectorField::from_nodal(noise_load(cfg_.noise, state.u_tilde, dW));
  step_impl(state, load, ScalarField(space_->mesh.num_vertices()));
}

void ChorinStepper::modified_step(ChorinState& state, const ScalarField& dW) const {
  modified_step_with_load(state, ElementwiseVectorField::from_nodal(noise_load(cfg_.noise, state.u_tilde, dW)));
}

void ChorinStepper::modified_step_with_load(ChorinState& state, const ElementwiseVectorField& load) const {
  HelmholtzResult split;
  try {
    split = helmholtz_decompose(space_->ops, load, space_->laplace);
  } catch (const Error& e) {
    throw StepFailure(state.step_index, e.what());
  }
  step_impl(state, split.projected_load, split.potential);
}

void ChorinStepper::step_impl(ChorinState& state, const ElementwiseVectorField& noise_load,
                              const ScalarField& potential) const {
  if (state.step_index >= cfg_.steps) {
    throw InvalidArgument("ChorinStepper: state already at step " + std::to_string(state.step_index) + " of " +
                          std::to_string(cfg_.steps));
  }
  const auto& ops = space_->ops;
  const std::size_t n = space_->mesh.num_vertices();
  if (state.u_tilde.num_vertices() != n || state.pressure.size() != n) {
    throw DimensionMismatch("ChorinStepper: state does not live on the stepper's mesh");
  }
  const double k = k_;
  const double t_next = static_cast<double>(state.step_index + 1) * k;

  try {
    // (u~^{n+1}, v) + k nu (grad u~^{n+1}, grad v)
    //   = (u~^n, v) - k (grad p^n, v) + k (f^{n+1}, v) + (noise load, v)
    Eigen::VectorXd rhs = ops.mass_v * state.u_tilde.coeffs;
    rhs.noalias() += k * forcing_moments(t_next);
    rhs.noalias() += vector_moments(ops, noise_load);
    rhs.noalias() -= ops.grad_coupling * (k * state.pressure.coeffs);

    const VectorField rhs_field(std::move(rhs));
    const Eigen::VectorXd u1 = momentum_.solve(rhs_field.component(0));
    const Eigen::VectorXd u2 = momentum_.solve(rhs_field.component(1));
    VectorField u_next = VectorField::from_components(u1, u2);

    // (grad p^{n+1}, grad phi) = (1/k) (u~^{n+1}, grad phi)
    const Eigen::VectorXd div_rhs = (ops.grad_coupling.transpose() * u_next.coeffs) / k;
    const double div_scale = abs_product_norm(ops.grad_coupling.transpose(), u_next.coeffs) / k;
    ScalarField r_next(space_->laplace.solve(div_rhs, nullptr, div_scale));
    normalize_mean(r_next, ops);

    ScalarField p_next(r_next.coeffs + potential.coeffs / k);
    normalize_mean(p_next, ops);

    state.p_time_integral.coeffs.noalias() += k * p_next.coeffs;
    state.r_time_integral.coeffs.noalias() += k * r_next.coeffs;
    state.u_tilde = std::move(u_next);
    state.pressure = std::move(r_next);
    state.recovered_pressure = std::move(p_next);
    ++state.step_index;
  } catch (const StepFailure&) {
    throw;
  } catch (const Error& e) {
    throw StepFailure(state.step_index, e.what());
  }
}

double divergence_residual(const FemOperators& ops, const VectorField& u_tilde, const ScalarField& pressure,
                           double k) {
  const Eigen::VectorXd res =
      ops.grad_coupling.transpose() * u_tilde.coeffs - k * (ops.stiff_s * pressure.coeffs);
  const double scale = l2_norm(u_tilde, ops);
  const double r = res.lpNorm<Eigen::Infinity>();
  return scale > 0.0 ? r / scale : r;
}

std::vector<std::size_t> all_steps(std::size_t steps) {
  std::vector<std::size_t> s(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) s[i] = i;
  return s;
}

namespace {

Checkpoint make_checkpoint(const ChorinState& state, double k, const FemOperators& ops, StoragePolicy policy) {
  Checkpoint c;
  c.step = state.step_index;
  c.time = static_cast<double>(state.step_index) * k;
  c.u_l2 = l2_norm(state.u_tilde, ops);
  c.u_h1 = h1_seminorm(state.u_tilde, ops);
  c.p_integral_l2 = l2_norm(state.p_time_integral, ops);
  if (policy == StoragePolicy::FullFields) {
    c.u_tilde = state.u_tilde;
    c.recovered_pressure = state.recovered_pressure;
    c.p_time_integral = state.p_time_integral;
    c.r_time_integral = state.r_time_integral;
  }
  return c;
}

}  // namespace

TrajectoryRecord run_trajectory(const ChorinStepper& stepper, const ModeBasis& basis,
                                const IncrementTable& increments, const VectorField& initial,
                                std::span<const std::size_t> checkpoint_steps, StoragePolicy policy) {
  const auto& cfg = stepper.config();
  if (static_cast<std::size_t>(increments.rows()) != cfg.steps) {
    throw DimensionMismatch("run_trajectory: increment table has " + std::to_string(increments.rows()) +
                            " rows, expected " + std::to_string(cfg.steps));
  }
  if (static_cast<std::size_t>(increments.cols()) != basis.num_modes()) {
    throw DimensionMismatch("run_trajectory: increment table and mode basis disagree on the mode count");
  }
  for (std::size_t i = 0; i < checkpoint_steps.size(); ++i) {
    if (checkpoint_steps[i] > cfg.steps || (i > 0 && checkpoint_steps[i] <= checkpoint_steps[i - 1])) {
      throw InvalidArgument("run_trajectory: checkpoint steps must be strictly increasing and <= M");
    }
  }

  TrajectoryRecord record;
  record.mesh_cells = stepper.space().mesh.n_cells();
  record.step = stepper.step();
  record.policy = policy;
  record.checkpoints.reserve(checkpoint_steps.size());

  const auto& ops = stepper.space().ops;
  ChorinState state = ChorinState::initial(initial);
  auto next = checkpoint_steps.begin();
  auto maybe_record = [&] {
    if (next != checkpoint_steps.end() && *next == state.step_index) {
      record.checkpoints.push_back(make_checkpoint(state, stepper.step(), ops, policy));
      ++next;
    }
  };
  maybe_record();
  for (std::size_t m = 0; m < cfg.steps; ++m) {
    const ScalarField dW = increment_field(basis, increments.row(static_cast<Eigen::Index>(m)).transpose());
    stepper.advance(state, dW);
    maybe_record();
  }
  return record;
}

TrajectoryRecord run_trajectory(const ChorinStepper& stepper, const ModeBasis& basis,
                                const IncrementTable& increments, const VectorField& initial,
                                std::span<const double> checkpoint_times, StoragePolicy policy) {
  const double k = stepper.step();
  std::vector<std::size_t> steps;
  steps.reserve(checkpoint_times.size());
  for (double t : checkpoint_times) {
    const double ratio = t / k;
    const double rounded = std::round(ratio);
    if (rounded < 0.0 || std::abs(ratio - rounded) > 1e-9) {
      throw InvalidArgument("run_trajectory: checkpoint time " + std::to_string(t) +
                            " is not a multiple of the step " + std::to_string(k));
    }
    steps.push_back(static_cast<std::size_t>(rounded));
  }
  return run_trajectory(stepper, basis, increments, initial, std::span<const std::size_t>(steps), policy);
}

}  // namespace chorin

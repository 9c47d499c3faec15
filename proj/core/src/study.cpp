#include "chorin/study.hpp"

#include "chorin/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#ifndef CHORIN_VERSION_STRING
#define CHORIN_VERSION_STRING "unknown"
#endif

namespace chorin {

const char* code_version() noexcept { return CHORIN_VERSION_STRING; }

const char* to_string(CouplingMode m) noexcept {
  switch (m) {
    case CouplingMode::FixedH:
      return "fixed_h";
    case CouplingMode::BalancedHk:
      return "balanced_hk";
    case CouplingMode::BalancedHsqrtk:
      return "balanced_hsqrtk";
  }
  return "unknown";
}

std::vector<StudySpec::Level> StudySpec::levels() const {
  std::vector<Level> out;
  for (std::size_t m : coarse_steps) {
    const double k = final_time / static_cast<double>(m);
    switch (coupling) {
      case CouplingMode::FixedH:
        for (std::size_t n : mesh_cells) out.push_back({n, m});
        break;
      case CouplingMode::BalancedHk:
        out.push_back({std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(1.0 / k))), m});
        break;
      case CouplingMode::BalancedHsqrtk:
        out.push_back({std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(1.0 / std::sqrt(k)))), m});
        break;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Level& a, const Level& b) {
    return a.steps != b.steps ? a.steps < b.steps : a.cells < b.cells;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Level& a, const Level& b) { return a.steps == b.steps && a.cells == b.cells; }),
            out.end());
  return out;
}

void StudySpec::validate() const {
  if (realizations < 1) throw InvalidArgument("study: Np must be >= 1");
  if (fine_steps < 1) throw InvalidArgument("study: fine_steps must be >= 1");
  if (coarse_steps.empty()) throw InvalidArgument("study: at least one time step is required");
  if (coupling == CouplingMode::FixedH && mesh_cells.empty()) {
    throw InvalidArgument("study: fixed_h coupling needs at least one mesh size");
  }
  if (truncation < 1) throw InvalidArgument("study: J must be >= 1");
  if (!(final_time > 0.0)) throw InvalidArgument("study: T must be > 0");
  if (!(nu > 0.0)) throw InvalidArgument("study: nu must be > 0");
  if (reference_cells < 1) throw InvalidArgument("study: reference N must be >= 1");
  solve_cfg.validate();
  for (std::size_t m : coarse_steps) {
    if (m < 1 || fine_steps % m != 0) {
      throw InvalidArgument("study: k0 = T/" + std::to_string(fine_steps) + " does not divide k = T/" +
                            std::to_string(m));
    }
  }
  for (const auto& level : levels()) {
    if (level.cells < 1) throw InvalidArgument("study: mesh sizes must be >= 1");
    if (level.cells > reference_cells) {
      throw InvalidArgument("study: reference N = " + std::to_string(reference_cells) +
                            " is coarser than level N = " + std::to_string(level.cells));
    }
  }
}

namespace {

struct Welford {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double std_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  /// sqrt of the mean and its delta-method standard error.
  std::pair<double, double> root() const {
    const double e = std::sqrt(std::max(0.0, mean));
    return {e, e > 0.0 ? std_error() / (2.0 * e) : 0.0};
  }
};

struct LevelAccumulator {
  std::vector<Welford> u_sq;
  Welford u_av;
  Welford p_av;
  Welford gradsum;
  double wall = 0.0;
};

struct LevelResult {
  VelocityErrorContributions velocity;
  double p_av_sq = 0.0;
  double wall = 0.0;
};

struct RealizationResult {
  bool failed = false;
  std::vector<LevelResult> levels;
  double reference_wall = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TrajectoryRecord prolong_record(const TrajectoryRecord& rec, const SparseMatrix& prolongation,
                                const PeriodicMesh& target, const FemOperators& target_ops) {
  TrajectoryRecord out;
  out.mesh_cells = target.n_cells();
  out.step = rec.step;
  out.policy = rec.policy;
  out.checkpoints.reserve(rec.checkpoints.size());
  for (const auto& c : rec.checkpoints) {
    Checkpoint p;
    p.step = c.step;
    p.time = c.time;
    p.u_tilde = prolong(prolongation, c.u_tilde);
    p.recovered_pressure = prolong(prolongation, c.recovered_pressure);
    p.p_time_integral = prolong(prolongation, c.p_time_integral);
    p.r_time_integral = prolong(prolongation, c.r_time_integral);
    normalize_mean(p.recovered_pressure, target_ops);
    normalize_mean(p.p_time_integral, target_ops);
    normalize_mean(p.r_time_integral, target_ops);
    p.u_l2 = l2_norm(p.u_tilde, target_ops);
    p.u_h1 = h1_seminorm(p.u_tilde, target_ops);
    p.p_integral_l2 = l2_norm(p.p_time_integral, target_ops);
    out.checkpoints.push_back(std::move(p));
  }
  return out;
}

SchemeConfig scheme_config(const StudySpec& spec, std::size_t steps) {
  SchemeConfig cfg;
  cfg.final_time = spec.final_time;
  cfg.steps = steps;
  cfg.nu = spec.nu;
  cfg.forcing = spec.forcing;
  cfg.noise = spec.noise;
  cfg.variant = spec.variant;
  cfg.solve_cfg = spec.solve_cfg;
  return cfg;
}

}  // namespace

StudyReport run_convergence_study(const StudySpec& spec, const ProgressCallback& progress) {
  spec.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const auto levels = spec.levels();
  const QWienerSpec qspec = build_qwiener_spec(spec.truncation);

  std::map<std::size_t, std::shared_ptr<const SpaceDiscretization>> spaces;
  std::map<std::size_t, std::unique_ptr<ModeBasis>> bases;
  auto space_for = [&](std::size_t n) {
    auto it = spaces.find(n);
    if (it == spaces.end()) {
      auto s = std::make_shared<const SpaceDiscretization>(n, spec.solve_cfg);
      bases.emplace(n, std::make_unique<ModeBasis>(qspec, s->mesh));
      it = spaces.emplace(n, std::move(s)).first;
    }
    return it->second;
  };

  const auto ref_space = space_for(spec.reference_cells);
  const ChorinStepper ref_stepper(ref_space, scheme_config(spec, spec.fine_steps));

  std::vector<std::unique_ptr<ChorinStepper>> steppers;
  std::map<std::size_t, SparseMatrix> prolongations;
  std::set<std::size_t> ref_steps;
  for (const auto& level : levels) {
    const auto space = space_for(level.cells);
    steppers.push_back(std::make_unique<ChorinStepper>(space, scheme_config(spec, level.steps)));
    if (level.cells != spec.reference_cells && !prolongations.count(level.cells)) {
      prolongations.emplace(level.cells, prolongation_matrix(space->mesh, ref_space->mesh));
    }
    const std::size_t stride = spec.fine_steps / level.steps;
    for (std::size_t m = 0; m <= level.steps; ++m) ref_steps.insert(m * stride);
  }
  const std::vector<std::size_t> ref_checkpoints(ref_steps.begin(), ref_steps.end());

  auto run_one = [&](std::size_t index) {
    RealizationResult result;
    try {
      const BrownianPath path = sample_brownian_path(qspec, spec.fine_steps,
                                                     realization_seed(spec.master_seed, index),
                                                     spec.final_time, spec.scaling);
      auto t0 = std::chrono::steady_clock::now();
      const TrajectoryRecord reference =
          run_trajectory(ref_stepper, *bases.at(spec.reference_cells), path.increments,
                         VectorField(ref_space->mesh.num_vertices()), std::span<const std::size_t>(ref_checkpoints));
      result.reference_wall = seconds_since(t0);

      result.levels.reserve(levels.size());
      for (std::size_t l = 0; l < levels.size(); ++l) {
        t0 = std::chrono::steady_clock::now();
        const auto& level = levels[l];
        const ChorinStepper& stepper = *steppers[l];
        const IncrementTable coarse_inc = coarsen_increments(path, spec.fine_steps / level.steps);
        const auto ckpts = all_steps(level.steps);
        TrajectoryRecord coarse =
            run_trajectory(stepper, *bases.at(level.cells), coarse_inc,
                           VectorField(stepper.space().mesh.num_vertices()), std::span<const std::size_t>(ckpts));
        if (level.cells != spec.reference_cells) {
          coarse = prolong_record(coarse, prolongations.at(level.cells), ref_space->mesh, ref_space->ops);
        }
        LevelResult lr;
        lr.velocity = velocity_error_norms(reference, coarse, ref_space->ops);
        lr.p_av_sq = pressure_error_norm(reference, coarse, ref_space->ops);
        lr.wall = seconds_since(t0);
        result.levels.push_back(std::move(lr));
      }
    } catch (const Error&) {
      result.failed = true;
      result.levels.clear();
    }
    return result;
  };

  std::vector<LevelAccumulator> acc(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) acc[l].u_sq.resize(levels[l].steps + 1);

  StudyReport report;
  std::mutex mutex;
  std::map<std::size_t, RealizationResult> pending;
  std::size_t committed = 0;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr fatal;
  const std::size_t np = spec.realizations;
  const auto max_failures = static_cast<std::size_t>(std::floor(0.05 * static_cast<double>(np)));

  auto fold = [&](const RealizationResult& r) {
    report.reference_wall_time_s += r.reference_wall;
    if (r.failed) {
      ++report.failed_realizations;
      if (report.failed_realizations > max_failures) abort = true;
      return;
    }
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const auto& lr = r.levels[l];
      for (std::size_t m = 0; m < lr.velocity.u_sq.size(); ++m) acc[l].u_sq[m].add(lr.velocity.u_sq[m]);
      acc[l].u_av.add(lr.velocity.u_av_sq);
      acc[l].gradsum.add(lr.velocity.gradsum_sq);
      acc[l].p_av.add(lr.p_av_sq);
      acc[l].wall += lr.wall;
    }
  };

  auto worker = [&] {
    while (!abort) {
      const std::size_t i = next++;
      if (i >= np) break;
      RealizationResult r;
      try {
        r = run_one(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!fatal) fatal = std::current_exception();
        abort = true;
        break;
      }
      std::lock_guard lock(mutex);
      pending.emplace(i, std::move(r));
      for (auto it = pending.find(committed); it != pending.end(); it = pending.find(committed)) {
        fold(it->second);
        pending.erase(it);
        ++committed;
        if (progress) progress(committed, np);
      }
    }
  };

  std::size_t threads = spec.threads == 0 ? std::thread::hardware_concurrency() : spec.threads;
  threads = std::clamp<std::size_t>(threads, 1, np);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);
  if (report.failed_realizations > max_failures) throw StudyAborted(report.failed_realizations, np);

  for (std::size_t l = 0; l < levels.size(); ++l) {
    StudyRow row;
    row.cells = levels[l].cells;
    row.h = 1.0 / static_cast<double>(row.cells);
    row.steps = levels[l].steps;
    row.k = spec.final_time / static_cast<double>(row.steps);
    row.realizations = acc[l].u_av.n;
    std::tie(row.errors.e_u_av, row.std_errors.e_u_av) = acc[l].u_av.root();
    std::tie(row.errors.e_p_av, row.std_errors.e_p_av) = acc[l].p_av.root();
    std::tie(row.errors.e_gradsum, row.std_errors.e_gradsum) = acc[l].gradsum.root();
    for (const auto& w : acc[l].u_sq) {
      const auto [e, se] = w.root();
      if (e > row.errors.e_u_max) {
        row.errors.e_u_max = e;
        row.std_errors.e_u_max = se;
      }
    }
    row.wall_time_s = acc[l].wall;
    report.rows.push_back(row);
  }

  std::map<std::string, std::vector<const StudyRow*>> groups;
  for (const auto& row : report.rows) {
    const std::string g =
        spec.coupling == CouplingMode::FixedH ? "N=" + std::to_string(row.cells) : std::string("balanced");
    groups[g].push_back(&row);
  }
  for (const auto& [name, rows] : groups) {
    if (rows.size() < 3) continue;
    const std::pair<const char*, double ErrorTriple::*> norms[] = {{"e_u_max", &ErrorTriple::e_u_max},
                                                                   {"e_u_av", &ErrorTriple::e_u_av},
                                                                   {"e_p_av", &ErrorTriple::e_p_av},
                                                                   {"e_gradsum", &ErrorTriple::e_gradsum}};
    for (const auto& [norm, member] : norms) {
      std::vector<std::pair<double, double>> pts;
      for (const auto* r : rows) pts.emplace_back(r->k, r->errors.*member);
      const bool positive = std::all_of(pts.begin(), pts.end(), [](const auto& p) { return p.second > 0.0; });
      if (!positive) continue;
      report.rates.push_back({name, norm, fit_rate(pts), pts.size()});
    }
  }

  report.spec_hash = spec_hash(spec);
  report.master_seed = spec.master_seed;
  report.code_version = code_version();
  report.variant = spec.variant;
  report.total_wall_time_s = seconds_since(t_start);
  return report;
}

}  // namespace chorin

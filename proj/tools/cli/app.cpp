#include "cli/app.hpp"

#include "cli/config_file.hpp"

#include <chorin/chorin_scheme.hpp>
#include <chorin/errors.hpp>
#include <chorin/report_io.hpp>
#include <chorin/study.hpp>
#include <chorin/validation.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace chorin::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir = ".";
  std::string threads;
  int verbosity = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "INI configuration file or a previous JSON summary");
  cmd->add_option("--set", o.overrides, "Override as section.key=value (repeatable, applied after --config)");
  cmd->add_option("--output-dir,-o", o.output_dir, "Directory for output files");
  cmd->add_option("--threads", o.threads, "Worker threads or 'auto' (default: $CHORIN_THREADS, else auto)");
  cmd->add_flag("-v,--verbose", o.verbosity, "Log progress to stderr");
}

/// File config, then CLI shortcuts, then --set overrides.
StudySpec resolve_spec(StudySpec base, const CommonOptions& o, const KeyValueConfig& shortcuts) {
  KeyValueConfig merged;
  if (const char* env = std::getenv("CHORIN_THREADS"); env && *env) merged["run.threads"] = env;
  if (!o.config_path.empty()) {
    for (auto& [k, v] : read_config_file(o.config_path)) merged[k] = v;
  }
  for (const auto& [k, v] : shortcuts) merged[k] = v;
  if (!o.threads.empty()) merged["run.threads"] = o.threads;
  for (auto& [k, v] : parse_overrides(o.overrides)) merged[k] = v;
  return apply_config(std::move(base), merged);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write '" + path.string() + "'");
  f << content;
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InvalidArgument("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

int run_study(const CommonOptions& o, const std::string& preset, double scale, const std::string& seed,
              std::ostream& out, std::ostream& err) {
  StudySpec base = preset.empty() ? StudySpec{} : make_preset(preset, scale);
  base.threads = 0;
  KeyValueConfig shortcuts;
  if (!seed.empty()) shortcuts["study.seed"] = seed;
  const StudySpec spec = resolve_spec(base, o, shortcuts);
  spec.validate();
  const std::string name = preset.empty() ? "study" : preset;

  if (o.verbosity > 0) {
    err << "info: " << name << ": " << spec.levels().size() << " levels, Np = " << spec.realizations
        << ", k0 = 1/" << spec.fine_steps << ", reference N = " << spec.reference_cells << '\n';
  }
  ProgressCallback progress;
  if (o.verbosity > 0) {
    progress = [&err](std::size_t done, std::size_t total) {
      if (done == total || done % std::max<std::size_t>(1, total / 10) == 0) {
        err << "info: realization " << done << "/" << total << '\n';
      }
    };
  }
  const StudyReport report = run_convergence_study(spec, progress);

  const fs::path dir = ensure_dir(o.output_dir);
  {
    std::ofstream csv(dir / (name + ".csv"));
    if (!csv) throw InvalidArgument("cannot write CSV into '" + dir.string() + "'");
    write_csv(csv, report);
  }
  write_file(dir / (name + ".json"), to_json(report, to_config(spec)));
  write_file(dir / (name + ".gp"), gnuplot_script(report, name, name + ".png"));

  out << "variant=" << to_string(spec.variant) << " rows=" << report.rows.size()
      << " failed=" << report.failed_realizations << " wall=" << report.total_wall_time_s << "s\n";
  for (const auto& r : report.rates) {
    out << "rate " << r.group << ' ' << r.norm << " slope=" << r.fit.slope << '\n';
  }
  out << "wrote " << (dir / (name + ".csv")).string() << ", " << (dir / (name + ".json")).string() << ", "
      << (dir / (name + ".gp")).string() << '\n';
  return kOk;
}

int single_run(const CommonOptions& o, const std::string& variant, std::size_t cells, const std::string& step,
               const std::string& seed, bool dump_fields, bool dump_path, std::ostream& out, std::ostream& err) {
  KeyValueConfig shortcuts;
  if (!variant.empty()) shortcuts["study.variant"] = variant;
  if (!seed.empty()) shortcuts["study.seed"] = seed;
  StudySpec spec = resolve_spec(StudySpec{}, o, shortcuts);
  if (cells > 0) spec.mesh_cells = {cells};
  if (!step.empty()) spec.coarse_steps = apply_config(spec, {{"study.k", step}}).coarse_steps;
  if (spec.mesh_cells.size() != 1 || spec.coarse_steps.size() != 1) {
    throw InvalidArgument("single-run needs exactly one mesh size (--N) and one step (--k)");
  }
  const std::size_t n = spec.mesh_cells.front();
  const std::size_t steps = spec.coarse_steps.front();

  SchemeConfig cfg;
  cfg.final_time = spec.final_time;
  cfg.steps = steps;
  cfg.nu = spec.nu;
  cfg.forcing = spec.forcing;
  cfg.noise = spec.noise;
  cfg.variant = spec.variant;
  cfg.solve_cfg = spec.solve_cfg;

  auto space = std::make_shared<const SpaceDiscretization>(n, spec.solve_cfg);
  const ChorinStepper stepper(space, cfg);
  const auto qspec = build_qwiener_spec(spec.truncation);
  const ModeBasis basis(qspec, space->mesh);
  const BrownianPath path = sample_brownian_path(qspec, steps, realization_seed(spec.master_seed, 0),
                                                 spec.final_time, spec.scaling);
  const auto ckpts = all_steps(steps);
  const auto policy = dump_fields ? StoragePolicy::FullFields : StoragePolicy::NormsOnly;
  const TrajectoryRecord rec = run_trajectory(stepper, basis, path.increments, VectorField(space->mesh.num_vertices()),
                                              std::span<const std::size_t>(ckpts), policy);

  const fs::path dir = ensure_dir(o.output_dir);
  std::ostringstream norms;
  norms << std::setprecision(17) << "step,time,u_l2,u_h1,p_integral_l2\n";
  for (const auto& c : rec.checkpoints) {
    norms << c.step << ',' << c.time << ',' << c.u_l2 << ',' << c.u_h1 << ',' << c.p_integral_l2 << '\n';
  }
  write_file(dir / "trajectory.csv", norms.str());

  if (dump_fields) {
    std::ostringstream f;
    f << std::setprecision(17);
    f << "# chorin-fields v1 N=" << n << " h=" << space->mesh.h() << " k=" << stepper.step()
      << " variant=" << to_string(spec.variant) << '\n';
    f << "step,time,vertex,x1,x2,u1,u2,p,P,R\n";
    for (const auto& c : rec.checkpoints) {
      for (std::size_t v = 0; v < space->mesh.num_vertices(); ++v) {
        const auto i = static_cast<Eigen::Index>(v);
        const auto& x = space->mesh.vertices()[v];
        f << c.step << ',' << c.time << ',' << v << ',' << x[0] << ',' << x[1] << ',' << c.u_tilde.coeffs[2 * i] << ','
          << c.u_tilde.coeffs[2 * i + 1] << ',' << c.recovered_pressure.coeffs[i] << ','
          << c.p_time_integral.coeffs[i] << ',' << c.r_time_integral.coeffs[i] << '\n';
      }
    }
    write_file(dir / "fields.csv", f.str());
  }
  if (dump_path) write_file(dir / "path.csv", path_to_csv(qspec, path));

  const auto& last = rec.checkpoints.back();
  out << "variant=" << to_string(spec.variant) << " N=" << n << " k=" << stepper.step() << " steps=" << steps
      << " |u(T)|=" << last.u_l2 << " |P(T)|=" << last.p_integral_l2 << '\n';
  if (o.verbosity > 0) err << "info: wrote " << (dir / "trajectory.csv").string() << '\n';
  return kOk;
}

int validate(std::ostream& out) {
  const ValidationReport report = run_invariant_suite();
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << c.value << " threshold=" << c.threshold;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << '\n';
  }
  out << (report.all_passed() ? "all invariant checks passed" : "invariant checks FAILED") << " in "
      << report.wall_time_s << "s\n";
  return report.all_passed() ? kOk : kAcceptanceFailure;
}

int plot_emit(const std::string& input, const std::string& output, const std::string& title, std::ostream& out) {
  std::ifstream in(input);
  if (!in) throw InvalidArgument("cannot open '" + input + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const StudyReport report = report_from_json(buf.str());
  fs::path target = output.empty() ? fs::path(input).replace_extension(".gp") : fs::path(output);
  const std::string png = fs::path(target).replace_extension(".png").filename().string();
  write_file(target, gnuplot_script(report, title.empty() ? fs::path(input).stem().string() : title, png));
  out << "wrote " << target.string() << '\n';
  return kOk;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Configuration:
      return kConfigError;
    case ErrorKind::Numerical:
    case ErrorKind::Invariant:
      return kNumericalFailure;
  }
  return kNumericalFailure;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chorin projection FE solvers for the periodic stochastic Stokes equations"};
  app.require_subcommand(1);

  CommonOptions study_opts, single_opts;
  std::string preset, seed, single_seed, variant, step;
  double scale = 1.0;
  std::size_t cells = 0;
  bool dump_fields = false, dump_path = false;
  std::string plot_input, plot_output, plot_title;

  auto* study = app.add_subcommand("run-study", "Monte Carlo convergence study");
  add_common(study, study_opts);
  study->add_option("--preset", preset, "fig5_1, fig5_3, fig5_4, fig5_5, fig5_6 or fig5_7");
  study->add_option("--scale", scale, "Shrink factor in (0, 1] for presets")->check(CLI::Range(1e-6, 1.0));
  study->add_option("--seed", seed, "Master seed");

  auto* single = app.add_subcommand("single-run", "One trajectory at a single (N, k)");
  add_common(single, single_opts);
  single->add_option("--variant", variant, "standard or modified");
  single->add_option("--N", cells, "Mesh cells per direction");
  single->add_option("--k", step, "Time step, e.g. 0.0625 or 1/16");
  single->add_option("--seed", single_seed, "Seed");
  single->add_flag("--dump-fields", dump_fields, "Write fields.csv with every snapshot");
  single->add_flag("--dump-path", dump_path, "Write path.csv with the Brownian increments");

  auto* val = app.add_subcommand("validate", "Run the invariant suite");

  auto* plot = app.add_subcommand("plot-emit", "Emit a gnuplot script from a JSON summary");
  plot->add_option("--input,-i", plot_input, "JSON summary written by run-study")->required();
  plot->add_option("--output", plot_output, "Script path (default: input with .gp)");
  plot->add_option("--title", plot_title, "Plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error[E_CLI]: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*study) return run_study(study_opts, preset, scale, seed, out, err);
    if (*single) return single_run(single_opts, variant, cells, step, single_seed, dump_fields, dump_path, out, err);
    if (*val) return validate(out);
    if (*plot) return plot_emit(plot_input, plot_output, plot_title, out);
  } catch (const Error& e) {
    err << "error[" << e.code() << "]: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error[E_INTERNAL]: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kConfigError;
}

}  // namespace chorin::cli

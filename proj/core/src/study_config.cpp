#include "chorin/errors.hpp"
#include "chorin/study.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace chorin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw InvalidArgument("config key '" + key + "': cannot parse '" + value + "' as " + expected);
}

/// Accepts plain reals and fractions "a/b".
double parse_real(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  const auto slash = value.find('/');
  if (slash != std::string::npos) {
    const double num = parse_real(key, value.substr(0, slash));
    const double den = parse_real(key, value.substr(slash + 1));
    if (den == 0.0) bad_value(key, value, "a fraction with nonzero denominator");
    return num / den;
  }
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(x)) bad_value(key, value, "a real");
  return x;
}

std::uint64_t parse_uint(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "a non-negative integer");
  return x;
}

std::vector<std::size_t> parse_uint_list(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(value)) out.push_back(static_cast<std::size_t>(parse_uint(key, item)));
  if (out.empty()) bad_value(key, value, "a non-empty list");
  return out;
}

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(xs[i]);
  }
  return s;
}

std::size_t steps_from_step_size(const std::string& key, const std::string& item, double final_time) {
  const double k = parse_real(key, item);
  if (!(k > 0.0)) bad_value(key, item, "a positive step size");
  const double m = final_time / k;
  const double r = std::round(m);
  if (r < 1.0 || std::abs(m - r) > 1e-9 * r) bad_value(key, item, "a step size dividing T");
  return static_cast<std::size_t>(r);
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "study.variant",      "study.coupling",     "study.mesh_cells",      "study.steps",
      "study.k",            "study.fine_steps",   "study.k0",              "study.reference_cells",
      "study.realizations", "study.seed",         "physics.final_time",    "physics.nu",
      "physics.forcing",    "noise.model",        "noise.coefficient",     "noise.truncation",
      "noise.increment_scaling", "solver.method", "solver.rel_tol",        "solver.max_iter",
      "run.threads"};
  return keys;
}

StudySpec apply_config(StudySpec spec, const KeyValueConfig& config) {
  for (const auto& [key, value] : config) {
    if (std::find(known_config_keys().begin(), known_config_keys().end(), key) == known_config_keys().end()) {
      throw InvalidArgument("unknown config key '" + key + "'");
    }
  }
  // T first: step-size keys are converted to step counts with it.
  if (auto it = config.find("physics.final_time"); it != config.end()) {
    spec.final_time = parse_real(it->first, it->second);
  }

  for (const auto& [key, raw] : config) {
    const std::string value = trim(raw);
    if (key == "physics.final_time") {
      continue;
    } else if (key == "study.variant") {
      if (value == "standard") spec.variant = SchemeVariant::Standard;
      else if (value == "modified") spec.variant = SchemeVariant::Modified;
      else bad_value(key, value, "standard|modified");
    } else if (key == "study.coupling") {
      if (value == "fixed_h") spec.coupling = CouplingMode::FixedH;
      else if (value == "balanced_hk") spec.coupling = CouplingMode::BalancedHk;
      else if (value == "balanced_hsqrtk") spec.coupling = CouplingMode::BalancedHsqrtk;
      else bad_value(key, value, "fixed_h|balanced_hk|balanced_hsqrtk");
    } else if (key == "study.mesh_cells") {
      spec.mesh_cells = parse_uint_list(key, value);
    } else if (key == "study.steps") {
      spec.coarse_steps = parse_uint_list(key, value);
    } else if (key == "study.k") {
      spec.coarse_steps.clear();
      for (const auto& item : split_list(value)) {
        spec.coarse_steps.push_back(steps_from_step_size(key, item, spec.final_time));
      }
      if (spec.coarse_steps.empty()) bad_value(key, value, "a non-empty list");
    } else if (key == "study.fine_steps") {
      spec.fine_steps = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "study.k0") {
      spec.fine_steps = steps_from_step_size(key, value, spec.final_time);
    } else if (key == "study.reference_cells") {
      spec.reference_cells = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "study.realizations") {
      spec.realizations = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "study.seed") {
      spec.master_seed = parse_uint(key, value);
    } else if (key == "physics.nu") {
      spec.nu = parse_real(key, value);
    } else if (key == "physics.forcing") {
      const auto parts = split_list(value);
      if (parts.size() != 2) bad_value(key, value, "two comma-separated reals");
      spec.forcing = {parse_real(key, parts[0]), parse_real(key, parts[1])};
    } else if (key == "noise.model") {
      if (value == "zero") spec.noise = NoiseModel::zero();
      else if (value == "sqrt_plus_one") spec.noise = NoiseModel::sqrt_plus_one(spec.noise.coefficient);
      else bad_value(key, value, "zero|sqrt_plus_one");
    } else if (key == "noise.coefficient") {
      spec.noise.coefficient = parse_real(key, value);
    } else if (key == "noise.truncation") {
      spec.truncation = static_cast<int>(parse_uint(key, value));
    } else if (key == "noise.increment_scaling") {
      if (value == "sqrt_k") spec.scaling = IncrementScaling::SqrtStep;
      else if (value == "k") spec.scaling = IncrementScaling::Step;
      else bad_value(key, value, "sqrt_k|k");
    } else if (key == "solver.method") {
      if (value == "cholesky") spec.solve_cfg.method = SolverMethod::SparseCholesky;
      else if (value == "cg") spec.solve_cfg.method = SolverMethod::ConjugateGradient;
      else bad_value(key, value, "cholesky|cg");
    } else if (key == "solver.rel_tol") {
      spec.solve_cfg.rel_tol = parse_real(key, value);
    } else if (key == "solver.max_iter") {
      spec.solve_cfg.max_iter = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "run.threads") {
      spec.threads = value == "auto" ? 0 : static_cast<std::size_t>(parse_uint(key, value));
    }
  }
  return spec;
}

KeyValueConfig to_config(const StudySpec& spec) {
  KeyValueConfig c;
  c["study.variant"] = to_string(spec.variant);
  c["study.coupling"] = to_string(spec.coupling);
  c["study.mesh_cells"] = join(spec.mesh_cells);
  c["study.steps"] = join(spec.coarse_steps);
  c["study.fine_steps"] = std::to_string(spec.fine_steps);
  c["study.reference_cells"] = std::to_string(spec.reference_cells);
  c["study.realizations"] = std::to_string(spec.realizations);
  c["study.seed"] = std::to_string(spec.master_seed);
  c["physics.final_time"] = format_real(spec.final_time);
  c["physics.nu"] = format_real(spec.nu);
  c["physics.forcing"] = format_real(spec.forcing[0]) + "," + format_real(spec.forcing[1]);
  switch (spec.noise.kind) {
    case NoiseModel::Kind::Zero:
      c["noise.model"] = "zero";
      break;
    case NoiseModel::Kind::SqrtPlusOne:
      c["noise.model"] = "sqrt_plus_one";
      break;
    case NoiseModel::Kind::Custom:
      c["noise.model"] = "custom";
      break;
  }
  c["noise.coefficient"] = format_real(spec.noise.coefficient);
  c["noise.truncation"] = std::to_string(spec.truncation);
  c["noise.increment_scaling"] = spec.scaling == IncrementScaling::SqrtStep ? "sqrt_k" : "k";
  c["solver.method"] = spec.solve_cfg.method == SolverMethod::SparseCholesky ? "cholesky" : "cg";
  c["solver.rel_tol"] = format_real(spec.solve_cfg.rel_tol);
  c["solver.max_iter"] = std::to_string(spec.solve_cfg.max_iter);
  c["run.threads"] = spec.threads == 0 ? "auto" : std::to_string(spec.threads);
  return c;
}

std::string spec_hash(const StudySpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [key, value] : to_config(spec)) {
    if (key == "run.threads") continue;
    for (char ch : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace chorin

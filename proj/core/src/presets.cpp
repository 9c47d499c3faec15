#include "chorin/errors.hpp"
#include "chorin/study.hpp"

#include <algorithm>
#include <cmath>

namespace chorin {

namespace {

StudySpec base_test(SchemeVariant variant, double coefficient, std::size_t np) {
  StudySpec s;
  s.variant = variant;
  s.noise = NoiseModel::sqrt_plus_one(coefficient);
  s.truncation = 2;
  s.realizations = np;
  s.fine_steps = 4096;
  s.reference_cells = 50;
  s.final_time = 1.0;
  s.nu = 1.0;
  s.forcing = {1.0, 1.0};
  return s;
}

std::size_t floor_pow2(double x) {
  std::size_t p = 1;
  while (static_cast<double>(2 * p) <= x) p *= 2;
  return p;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig5_1", "fig5_3", "fig5_4", "fig5_5", "fig5_6", "fig5_7"};
  return names;
}

StudySpec make_preset(const std::string& name, double scale) {
  if (!(scale > 0.0 && scale <= 1.0)) throw InvalidArgument("preset scale must lie in (0, 1]");

  const bool test1 = name == "fig5_1" || name == "fig5_3" || name == "fig5_4";
  const bool test2 = name == "fig5_5" || name == "fig5_6" || name == "fig5_7";
  if (!test1 && !test2) throw InvalidArgument("unknown preset '" + name + "'");

  StudySpec s = test1 ? base_test(SchemeVariant::Standard, 10.0, 500) : base_test(SchemeVariant::Modified, 1.0, 800);
  if (name == "fig5_1" || name == "fig5_5") {
    s.coupling = CouplingMode::FixedH;
    s.mesh_cells = {50};
    s.coarse_steps = {16, 32, 64, 128, 256};
  } else if (name == "fig5_3" || name == "fig5_6") {
    s.coupling = CouplingMode::FixedH;
    s.mesh_cells = {20};
    s.coarse_steps = {16, 32, 64, 128, 256, 512, 1024};
  } else if (name == "fig5_4") {
    s.coupling = CouplingMode::BalancedHk;
    s.coarse_steps = {4, 8, 16, 32};
  } else {
    s.coupling = CouplingMode::BalancedHsqrtk;
    s.coarse_steps = {16, 64, 256, 1024};
  }

  if (scale < 1.0) {
    s.realizations = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(static_cast<double>(s.realizations) * scale)));
    const auto levels = std::max<std::size_t>(
        std::min<std::size_t>(3, s.coarse_steps.size()),
        static_cast<std::size_t>(std::ceil(static_cast<double>(s.coarse_steps.size()) * scale)));
    s.coarse_steps.resize(levels);
    const std::size_t m_max = *std::max_element(s.coarse_steps.begin(), s.coarse_steps.end());
    s.fine_steps = std::max(4 * m_max, floor_pow2(static_cast<double>(s.fine_steps) * scale));
    const double mesh_factor = std::sqrt(scale);
    for (auto& n : s.mesh_cells) {
      n = std::max<std::size_t>(4, static_cast<std::size_t>(std::lround(static_cast<double>(n) * mesh_factor)));
    }
    std::size_t ref = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::lround(static_cast<double>(s.reference_cells) * mesh_factor)));
    for (const auto& level : s.levels()) ref = std::max(ref, level.cells);
    s.reference_cells = ref;
  }
  return s;
}

}  // namespace chorin

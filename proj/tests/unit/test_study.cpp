#include <chorin/errors.hpp>
#include <chorin/study.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace chorin;

namespace {

StudySpec small_spec() {
  StudySpec s;
  s.mesh_cells = {4};
  s.reference_cells = 4;
  s.coarse_steps = {4, 8, 16};
  s.fine_steps = 32;
  s.realizations = 8;
  s.noise = NoiseModel::sqrt_plus_one(1.0);
  s.master_seed = 9;
  return s;
}

void expect_same_rows(const StudyReport& a, const StudyReport& b) {
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].errors.e_u_max, b.rows[i].errors.e_u_max);
    EXPECT_EQ(a.rows[i].errors.e_u_av, b.rows[i].errors.e_u_av);
    EXPECT_EQ(a.rows[i].errors.e_p_av, b.rows[i].errors.e_p_av);
    EXPECT_EQ(a.rows[i].errors.e_gradsum, b.rows[i].errors.e_gradsum);
    EXPECT_EQ(a.rows[i].std_errors.e_u_av, b.rows[i].std_errors.e_u_av);
  }
}

}  // namespace

TEST(Study, SelfComparisonIsExact) {
  StudySpec s = small_spec();
  s.realizations = 1;
  s.noise = NoiseModel::zero();
  s.coarse_steps = {32};
  const auto report = run_convergence_study(s);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_LE(report.rows[0].errors.e_u_max, 1e-10);
  EXPECT_LE(report.rows[0].errors.e_u_av, 1e-10);
  EXPECT_LE(report.rows[0].errors.e_p_av, 1e-10);
  EXPECT_TRUE(report.rates.empty());
}

TEST(Study, RowsSortedAndRatesFitted) {
  const auto report = run_convergence_study(small_spec());
  ASSERT_EQ(report.rows.size(), 3u);
  for (std::size_t i = 1; i < report.rows.size(); ++i) EXPECT_GT(report.rows[i - 1].k, report.rows[i].k);
  EXPECT_EQ(report.rates.size(), 4u);
  for (const auto& r : report.rates) {
    EXPECT_EQ(r.group, "N=4");
    EXPECT_EQ(r.points, 3u);
    EXPECT_TRUE(std::isfinite(r.fit.slope));
  }
  for (const auto& row : report.rows) {
    EXPECT_EQ(row.realizations, 8u);
    EXPECT_GT(row.errors.e_u_av, 0.0);
    EXPECT_GE(row.std_errors.e_u_av, 0.0);
  }
  EXPECT_EQ(report.failed_realizations, 0u);
  EXPECT_EQ(report.spec_hash, spec_hash(small_spec()));
  EXPECT_EQ(report.master_seed, 9u);
}

TEST(Study, ThreadCountDoesNotChangeResults) {
  StudySpec a = small_spec();
  a.threads = 1;
  StudySpec b = small_spec();
  b.threads = 3;
  expect_same_rows(run_convergence_study(a), run_convergence_study(b));
}

TEST(Study, SeedControlsRealizations) {
  StudySpec a = small_spec();
  StudySpec b = small_spec();
  b.master_seed = 10;
  const auto ra = run_convergence_study(a);
  expect_same_rows(ra, run_convergence_study(a));
  EXPECT_NE(ra.rows[0].errors.e_u_av, run_convergence_study(b).rows[0].errors.e_u_av);
}

TEST(Study, StandardErrorShrinksLikeInverseSqrtNp) {
  StudySpec s = small_spec();
  s.coarse_steps = {4, 8};
  s.fine_steps = 16;
  s.realizations = 100;
  const auto few = run_convergence_study(s);
  s.realizations = 400;
  const auto many = run_convergence_study(s);
  for (std::size_t i = 0; i < few.rows.size(); ++i) {
    const double ratio = few.rows[i].std_errors.e_u_av / many.rows[i].std_errors.e_u_av;
    EXPECT_GE(ratio, 1.6);
    EXPECT_LE(ratio, 2.5);
  }
}

TEST(Study, ProlongedCoarseMeshesMatchExactNoiseFreeSolution) {
  StudySpec s = small_spec();
  s.noise = NoiseModel::zero();
  s.mesh_cells = {2, 4};
  s.reference_cells = 8;
  s.realizations = 2;
  const auto report = run_convergence_study(s);
  EXPECT_EQ(report.rows.size(), 6u);
  for (const auto& row : report.rows) EXPECT_LE(row.errors.e_u_max, 1e-10);
}

TEST(Study, BalancedLevels) {
  StudySpec s = small_spec();
  s.coupling = CouplingMode::BalancedHk;
  s.coarse_steps = {16, 4, 8};
  s.reference_cells = 16;
  const auto levels = s.levels();
  ASSERT_EQ(levels.size(), 3u);
  EXPECT_EQ(levels[0].cells, 4u);
  EXPECT_EQ(levels[0].steps, 4u);
  EXPECT_EQ(levels[2].cells, 16u);
  s.coupling = CouplingMode::BalancedHsqrtk;
  s.coarse_steps = {4, 16};
  EXPECT_EQ(s.levels()[0].cells, 2u);
  EXPECT_EQ(s.levels()[1].cells, 4u);
}

TEST(Study, ValidationRejectsBadSpecs) {
  StudySpec s = small_spec();
  s.coarse_steps = {5};
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = small_spec();
  s.reference_cells = 2;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = small_spec();
  s.realizations = 0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = small_spec();
  s.coupling = CouplingMode::BalancedHk;
  s.reference_cells = 8;
  EXPECT_THROW(s.validate(), InvalidArgument);  // k = 1/16 asks for N = 16
}

TEST(Study, AbortsWhenTooManyRealizationsFail) {
  StudySpec s = small_spec();
  s.solve_cfg.method = SolverMethod::ConjugateGradient;
  s.solve_cfg.max_iter = 1;
  try {
    run_convergence_study(s);
    FAIL() << "expected StudyAborted";
  } catch (const StudyAborted& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Numerical);
  }
}

TEST(StudyConfig, RoundTripIsLossless) {
  StudySpec s = small_spec();
  s.variant = SchemeVariant::Modified;
  s.coupling = CouplingMode::BalancedHsqrtk;
  s.final_time = 0.5;
  s.nu = 0.3;
  s.forcing = {0.1, -2.5};
  s.scaling = IncrementScaling::Step;
  s.solve_cfg.rel_tol = 1e-11;
  s.threads = 0;
  const auto cfg = to_config(s);
  const StudySpec back = apply_config(StudySpec{}, cfg);
  EXPECT_EQ(to_config(back), cfg);
  EXPECT_EQ(spec_hash(back), spec_hash(s));
  for (const auto& [key, value] : cfg) {
    EXPECT_NE(std::find(known_config_keys().begin(), known_config_keys().end(), key), known_config_keys().end());
  }
}

TEST(StudyConfig, StepSizesAndFractions) {
  const StudySpec s = apply_config(StudySpec{}, {{"study.k", "1/16, 0.03125"}, {"study.k0", "1/1024"}});
  EXPECT_EQ(s.coarse_steps, (std::vector<std::size_t>{16, 32}));
  EXPECT_EQ(s.fine_steps, 1024u);
  const StudySpec t = apply_config(StudySpec{}, {{"physics.final_time", "2"}, {"study.k", "0.5"}});
  EXPECT_EQ(t.coarse_steps, (std::vector<std::size_t>{4}));
  EXPECT_THROW(apply_config(StudySpec{}, {{"study.k", "0.3"}}), InvalidArgument);
}

TEST(StudyConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(apply_config(StudySpec{}, {{"study.bogus", "1"}}), InvalidArgument);
  EXPECT_THROW(apply_config(StudySpec{}, {{"study.variant", "fancy"}}), InvalidArgument);
  EXPECT_THROW(apply_config(StudySpec{}, {{"physics.nu", "abc"}}), InvalidArgument);
  EXPECT_THROW(apply_config(StudySpec{}, {{"physics.forcing", "1"}}), InvalidArgument);
}

TEST(StudyConfig, HashIgnoresThreads) {
  StudySpec a = small_spec();
  StudySpec b = small_spec();
  b.threads = 7;
  EXPECT_EQ(spec_hash(a), spec_hash(b));
  b.master_seed = 1;
  EXPECT_NE(spec_hash(a), spec_hash(b));
}

TEST(Presets, FullScaleValues) {
  const auto p1 = make_preset("fig5_1");
  EXPECT_EQ(p1.variant, SchemeVariant::Standard);
  EXPECT_EQ(p1.fine_steps, 4096u);
  EXPECT_EQ(p1.reference_cells, 50u);
  EXPECT_EQ(p1.realizations, 500u);
  EXPECT_EQ(p1.noise.coefficient, 10.0);
  EXPECT_EQ(p1.truncation, 2);
  const auto p5 = make_preset("fig5_5");
  EXPECT_EQ(p5.variant, SchemeVariant::Modified);
  EXPECT_EQ(p5.realizations, 800u);
  EXPECT_EQ(p5.noise.coefficient, 1.0);
  EXPECT_EQ(make_preset("fig5_4").coupling, CouplingMode::BalancedHk);
  EXPECT_EQ(make_preset("fig5_7").coupling, CouplingMode::BalancedHsqrtk);
  EXPECT_EQ(make_preset("fig5_3").mesh_cells, (std::vector<std::size_t>{20}));
  for (const auto& name : preset_names()) EXPECT_NO_THROW(make_preset(name).validate()) << name;
  EXPECT_THROW(make_preset("fig9"), InvalidArgument);
  EXPECT_THROW(make_preset("fig5_1", 0.0), InvalidArgument);
}

TEST(Presets, ScaledPresetsStayValidAndSmaller) {
  for (const auto& name : preset_names()) {
    const auto full = make_preset(name);
    const auto small = make_preset(name, 0.25);
    EXPECT_NO_THROW(small.validate()) << name;
    EXPECT_LE(small.realizations, full.realizations);
    EXPECT_GE(small.coarse_steps.size(), std::min<std::size_t>(3, full.coarse_steps.size()));
    EXPECT_LE(small.fine_steps, full.fine_steps);
    EXPECT_EQ(small.coarse_steps.front(), full.coarse_steps.front());
  }
}

#include <chorin/chorin_scheme.hpp>
#include <chorin/fem_operators.hpp>
#include <chorin/linear_solver.hpp>
#include <chorin/qwiener.hpp>

#include <benchmark/benchmark.h>

#include <memory>

using namespace chorin;

namespace {

void BM_Assemble(benchmark::State& state) {
  const PeriodicMesh mesh(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operators(mesh));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_Assemble)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void poisson_solve(benchmark::State& state, SolverMethod method) {
  const PeriodicMesh mesh(static_cast<std::size_t>(state.range(0)));
  const auto ops = assemble_operators(mesh);
  SolveConfig cfg;
  cfg.method = method;
  cfg.deflate_constants = true;
  const SpdSolver solver(ops.stiff_s, cfg);
  Eigen::VectorXd rhs = Eigen::VectorXd::Random(static_cast<Eigen::Index>(mesh.num_vertices()));
  rhs.array() -= rhs.mean();
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(rhs));
}

void BM_PoissonCholesky(benchmark::State& state) { poisson_solve(state, SolverMethod::SparseCholesky); }
void BM_PoissonCG(benchmark::State& state) { poisson_solve(state, SolverMethod::ConjugateGradient); }
BENCHMARK(BM_PoissonCholesky)->RangeMultiplier(2)->Range(16, 128);
BENCHMARK(BM_PoissonCG)->RangeMultiplier(2)->Range(16, 128);

void BM_Step(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto space = std::make_shared<const SpaceDiscretization>(n, SolveConfig{});
  SchemeConfig cfg;
  cfg.steps = 1u << 20;
  cfg.noise = NoiseModel::sqrt_plus_one(1.0);
  cfg.variant = state.range(1) ? SchemeVariant::Modified : SchemeVariant::Standard;
  const ChorinStepper stepper(space, cfg);
  const auto spec = build_qwiener_spec(2);
  const ModeBasis basis(spec, space->mesh);
  const auto path = sample_brownian_path(spec, 64, 1);
  ChorinState s = ChorinState::initial(VectorField(space->mesh.num_vertices()));
  Eigen::Index row = 0;
  for (auto _ : state) {
    const ScalarField dW = increment_field(basis, path.increments.row(row).transpose());
    row = (row + 1) % path.increments.rows();
    stepper.advance(s, dW);
  }
  state.SetLabel(to_string(cfg.variant));
}
BENCHMARK(BM_Step)->ArgsProduct({{16, 32, 64}, {0, 1}});

}  // namespace

BENCHMARK_MAIN();

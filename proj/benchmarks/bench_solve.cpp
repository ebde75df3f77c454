#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "artnav/pipeline.hpp"
#include "artnav/solver.hpp"

namespace {

namespace pl = artnav::pipeline;
namespace sim = artnav::sim;
namespace graph = artnav::graph;

pl::RunConfig bench_config(sim::TrajectoryKind kind, pl::Mode mode) {
  pl::RunConfig cfg;
  cfg.mode = mode;
  cfg.trajectory.kind = kind;
  cfg.trajectory.duration = 10.0;
  cfg.trajectory.heading = 0.5;
  if (kind == sim::TrajectoryKind::kStaticPose) {
    cfg.trajectory.articulation = 0.17;
  } else {
    cfg.trajectory.speed = 2.78;
  }
  cfg.noise.rng_seed = 11;
  return cfg;
}

std::vector<graph::EpochProblem> make_problems(const pl::RunConfig& cfg) {
  const auto truth = sim::generate_trajectory(cfg.trajectory, cfg.vehicle);
  sim::MeasurementSynthesizer synth(cfg.noise);
  std::vector<graph::EpochProblem> out;
  out.reserve(truth.size());
  for (const auto& epoch : truth) {
    auto problem = pl::prepare_problem(synth.synthesize(epoch), cfg);
    // Without baselines an antenna with no CLAS fix leaves the epoch unsolvable.
    try {
      (void)graph::solve_epoch(problem, cfg.solver);
    } catch (const artnav::Error&) {
      continue;
    }
    out.push_back(std::move(problem));
  }
  return out;
}

// Cold start on every call: the solver initializes from the CLAS fixes.
void BM_SolveEpoch(benchmark::State& state) {
  const auto mode = state.range(0) == 0 ? pl::Mode::kProposed : pl::Mode::kClasOnly;
  const auto problems = make_problems(bench_config(sim::TrajectoryKind::kStaticPose, mode));
  const graph::SolverSettings settings;
  std::size_t i = 0;
  for (auto _ : state) {
    auto r = graph::solve_epoch(problems[i], settings);
    benchmark::DoNotOptimize(r.state);
    i = (i + 1) % problems.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SolveEpoch)->Arg(0)->Arg(1)->ArgName("clas_only");

void BM_SolveEpochWithOutlier(benchmark::State& state) {
  auto problems =
      make_problems(bench_config(sim::TrajectoryKind::kStaticPose, pl::Mode::kProposed));
  for (std::size_t k = 0; k < problems.size(); ++k) {
    problems[k].clas[k % 4].position += artnav::Vec3(0.6, -0.5, 0.6);
  }
  const graph::SolverSettings settings;
  std::size_t i = 0;
  for (auto _ : state) {
    auto r = graph::solve_epoch(problems[i], settings);
    benchmark::DoNotOptimize(r.state);
    i = (i + 1) % problems.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SolveEpochWithOutlier);

// Full per-epoch path with warm starts and vehicle-state derivation over a
// figure-eight segment.
void BM_EstimatorStream(benchmark::State& state) {
  const auto cfg = bench_config(sim::TrajectoryKind::kFigureEight, pl::Mode::kProposed);
  const auto problems = make_problems(cfg);
  for (auto _ : state) {
    pl::EpochEstimator estimator(cfg);
    for (const auto& p : problems) {
      auto rec = estimator.process(p);
      benchmark::DoNotOptimize(rec);
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(problems.size()));
}
BENCHMARK(BM_EstimatorStream)->Unit(benchmark::kMillisecond);

void BM_SynthesizeEpoch(benchmark::State& state) {
  const auto cfg = bench_config(sim::TrajectoryKind::kFigureEight, pl::Mode::kProposed);
  const auto truth = sim::generate_trajectory(cfg.trajectory, cfg.vehicle);
  sim::MeasurementSynthesizer synth(cfg.noise);
  std::size_t i = 0;
  for (auto _ : state) {
    auto p = synth.synthesize(truth[i]);
    benchmark::DoNotOptimize(p);
    i = (i + 1) % truth.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SynthesizeEpoch);

}  // namespace

BENCHMARK_MAIN();

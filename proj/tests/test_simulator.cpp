#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "artnav/path.hpp"
#include "artnav/records.hpp"
#include "artnav/simulator.hpp"
#include "artnav/solver.hpp"
#include "support.hpp"

namespace artnav::sim {
namespace {

const vehicle::VehicleConfig kCfg;

NoiseModel noise_free() {
  NoiseModel n;
  n.clas_sigma_fix.setZero();
  n.clas_sigma_float.setZero();
  n.mvrtk_sigma.setZero();
  n.mvrtk_float_sigma = 0.0;
  n.clas_fix_prob.fill(1.0);
  n.clas_float_prob.fill(0.0);
  n.mvrtk_fix_prob = 1.0;
  return n;
}

TrajectorySpec figure_eight(double duration = 40.0) {
  TrajectorySpec t;
  t.kind = TrajectoryKind::kFigureEight;
  t.duration = duration;
  t.speed = 2.78;
  t.loop_radius = 15.0;
  return t;
}

TEST(Path, LineAndArcGeometry) {
  Path p(Eigen::Vector2d(1, 2), kPi / 2);
  p.add_line(3.0);
  p.add_arc(2.0, kPi);
  EXPECT_NEAR(p.length(), 3.0 + 2.0 * kPi, 1e-12);
  const auto mid = p.sample(1.5);
  EXPECT_LT((mid.position - Eigen::Vector2d(1, 3.5)).norm(), 1e-12);
  EXPECT_DOUBLE_EQ(mid.curvature, 0.0);
  const auto end = p.end();
  EXPECT_LT((end.position - Eigen::Vector2d(-3, 5)).norm(), 1e-12);
  EXPECT_NEAR(std::remainder(end.heading + kPi / 2, 2 * kPi), 0.0, 1e-12);
  EXPECT_NEAR(p.sample(4.0).curvature, 0.5, 1e-15);
}

TEST(Path, FigureEightClosesOnItself) {
  const auto p = Path::figure_eight(Eigen::Vector2d(3, 4), 0.7, 15.0);
  EXPECT_NEAR(p.length(), 4 * kPi * 15.0, 1e-9);
  EXPECT_LT((p.end().position - Eigen::Vector2d(3, 4)).norm(), 1e-9);
  EXPECT_NEAR(std::remainder(p.end().heading - 0.7, 2 * kPi), 0.0, 1e-9);
}

TEST(Trajectory, StaticPoseCount) {
  TrajectorySpec t;
  t.duration = 300.0;
  t.heading = deg2rad(30);
  t.articulation = deg2rad(15);
  const auto truth = generate_trajectory(t, kCfg);
  ASSERT_EQ(truth.size(), 6000u);
  for (const auto& e : truth) {
    EXPECT_EQ(e.antennas.stacked(), truth.front().antennas.stacked());
  }
  EXPECT_NEAR(truth[1].timestamp - truth[0].timestamp, 0.05, 1e-15);
}

TEST(Trajectory, StraightWaypointsHaveZeroArticulation) {
  TrajectorySpec t;
  t.kind = TrajectoryKind::kWaypointPath;
  t.speed = 3.0;
  t.duration = 20.0;
  t.waypoints = {Eigen::Vector2d(0, 0), Eigen::Vector2d(30, 30), Eigen::Vector2d(80, 80)};
  for (const auto& e : generate_trajectory(t, kCfg)) {
    EXPECT_NEAR(e.state.articulation, 0.0, 1e-12);
    EXPECT_NEAR(e.state.orientation, kPi / 4, 1e-12);
  }
}

TEST(Trajectory, FigureEightArticulationIsMirrored) {
  auto t = figure_eight();
  const double lobe = 2 * kPi * t.loop_radius / t.speed;
  t.duration = 2 * lobe;
  const auto truth = generate_trajectory(t, kCfg);
  const double expected = steady_turn_articulation(1.0 / 15.0, kCfg);
  EXPECT_GT(expected, 0.0);
  EXPECT_LT(expected, kCfg.max_articulation);
  const std::size_t half = truth.size() / 2;
  int checked = 0;
  for (std::size_t k = 5; k + 5 < half; ++k) {
    const auto& a = truth[k].state.articulation;
    const auto idx = static_cast<std::size_t>(std::llround((truth[k].timestamp + lobe) * t.epoch_rate));
    if (idx >= truth.size()) break;
    EXPECT_NEAR(a, expected, 1e-12);
    EXPECT_NEAR(truth[idx].state.articulation, -a, 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Trajectory, TruthIsSelfConsistent) {
  const auto truth = generate_trajectory(figure_eight(), kCfg);
  graph::SolveReport r;
  r.converged = true;
  for (const auto& e : truth) {
    const auto d = vehicle::derive_vehicle_state(e.timestamp, e.antennas, kCfg, r);
    EXPECT_NEAR(std::remainder(d.orientation - e.state.orientation, 2 * kPi), 0.0, 1e-12);
    EXPECT_NEAR(std::remainder(d.articulation - e.state.articulation, 2 * kPi), 0.0, 1e-12);
    EXPECT_LT((d.position - e.state.position).norm(), 1e-12 * std::max(1.0, e.state.position.norm()));
    EXPECT_NEAR((e.antennas[AntennaId(2)] - e.antennas[AntennaId(1)]).norm(), kCfg.length_front, 1e-12);
    EXPECT_NEAR((e.antennas[AntennaId(4)] - e.antennas[AntennaId(3)]).norm(), kCfg.length_rear, 1e-12);
  }
}

TEST(Trajectory, TightTurnIsConfigError) {
  auto t = figure_eight();
  t.loop_radius = 3.0;
  EXPECT_THROW((void)generate_trajectory(t, kCfg), ConfigError);
  TrajectorySpec s;
  s.articulation = deg2rad(60);
  EXPECT_THROW((void)generate_trajectory(s, kCfg), ConfigError);
  s = TrajectorySpec{};
  s.speed = 1.0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Synthesizer, NoiseFreeSolvesToTruth) {
  MeasurementSynthesizer synth(noise_free());
  for (const auto& e : generate_trajectory(figure_eight(5.0), kCfg)) {
    auto p = synth.synthesize(e);
    EXPECT_EQ(p.clas.size(), 4u);
    EXPECT_EQ(p.baselines.size(), 6u);
    p.prior = graph::BaselinePrior{kCfg.length_front, kCfg.length_rear, 1e-4};
    const auto r = graph::solve_epoch(p, graph::SolverSettings{});
    for (int i = 0; i < 4; ++i) {
      EXPECT_LT((r.state.positions[i] - e.antennas.positions[i]).norm(), 1e-9);
    }
  }
}

TEST(Synthesizer, MissingAntennaStaysObservable) {
  auto n = NoiseModel{};
  n.clas_fix_prob[1] = 0.0;
  n.clas_float_prob[1] = 0.0;
  n.mvrtk_fix_prob = 1.0;
  MeasurementSynthesizer synth(n);
  TrajectorySpec t;
  t.duration = 2.0;
  for (const auto& e : generate_trajectory(t, kCfg)) {
    const auto p = synth.synthesize(e);
    EXPECT_FALSE(p.clas[1].admitted());
    EXPECT_TRUE(graph::observability_check(p).well_posed);
  }
}

TEST(Synthesizer, NoiseMatchesConfiguredSigma) {
  NoiseModel n;
  n.clas_fix_prob.fill(1.0);
  n.clas_float_prob.fill(0.0);
  n.mvrtk_fix_prob = 1.0;
  n.rng_seed = 99;
  MeasurementSynthesizer synth(n);
  TrajectorySpec t;
  t.duration = 1000.0;  // 20000 epochs
  const auto truth = generate_trajectory(t, kCfg);
  Vec3 s2 = Vec3::Zero();
  Vec3 b2 = Vec3::Zero();
  std::size_t count = 0;
  for (const auto& e : truth) {
    const auto p = synth.synthesize(e);
    const Vec3 d = p.clas[0].position - e.antennas[AntennaId(1)];
    s2 += d.cwiseAbs2();
    const Vec3 db = p.baselines[0].baseline - (e.antennas[AntennaId(2)] - e.antennas[AntennaId(1)]);
    b2 += db.cwiseAbs2();
    ++count;
  }
  const Vec3 sd = (s2 / static_cast<double>(count)).cwiseSqrt();
  const Vec3 bsd = (b2 / static_cast<double>(count)).cwiseSqrt();
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(sd[k] / n.clas_sigma_fix[k], 1.0, 0.03);
    EXPECT_NEAR(bsd[k] / (std::sqrt(2.0) * n.mvrtk_sigma[k]), 1.0, 0.03);
  }
}

TEST(Synthesizer, CommonModeBiasIsShared) {
  auto n = noise_free();
  n.clas_bias.enabled = true;
  n.clas_bias.sigma = Vec3::Constant(0.02);
  MeasurementSynthesizer synth(n);
  TrajectorySpec t;
  t.duration = 10.0;
  for (const auto& e : generate_trajectory(t, kCfg)) {
    const auto p = synth.synthesize(e);
    const Vec3 d0 = p.clas[0].position - e.antennas[AntennaId(1)];
    EXPECT_GT(d0.norm(), 0.0);
    for (int i = 1; i < 4; ++i) {
      const Vec3 di = p.clas[static_cast<std::size_t>(i)].position - e.antennas.positions[static_cast<std::size_t>(i)];
      EXPECT_LT((di - d0).norm(), 1e-12);
    }
  }
}

TEST(Synthesizer, SameSeedSameBytes) {
  auto run = [](std::uint64_t seed) {
    NoiseModel n;
    n.rng_seed = seed;
    n.outlier_prob = 0.05;
    n.clas_bias.enabled = true;
    MeasurementSynthesizer synth(n);
    std::ostringstream os;
    for (const auto& e : generate_trajectory(figure_eight(10.0), kCfg)) {
      os << io::format_measurement_record(synth.synthesize(e)) << '\n';
    }
    return os.str();
  };
  EXPECT_EQ(run(42), run(42));
  EXPECT_NE(run(42), run(43));
}

TEST(Synthesizer, InvalidNoiseIsConfigError) {
  NoiseModel n;
  n.clas_fix_prob[2] = 1.5;
  EXPECT_THROW(n.validate(), ConfigError);
  n = NoiseModel{};
  n.mvrtk_sigma.x() = -1.0;
  EXPECT_THROW(n.validate(), ConfigError);
}

TEST(Rng, UniformAndNormalMoments) {
  Rng rng(5);
  double su = 0, sn = 0, sn2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.01);
}

}  // namespace
}  // namespace artnav::sim

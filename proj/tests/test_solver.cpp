#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "artnav/factors.hpp"
#include "artnav/solver.hpp"
#include "support.hpp"

namespace artnav::graph {
namespace {

using artnav::testing::Gen;

const vehicle::VehicleConfig kCfg;

ClasFix clas(int ant, const Vec3& pos, double sigma = 0.02) {
  ClasFix f;
  f.antenna = AntennaId(ant);
  f.position = pos;
  f.covariance = sigma * sigma * Mat3::Identity();
  return f;
}

BaselineObservation baseline(int from, int to, const Vec3& b, double sigma = 0.003) {
  BaselineObservation o;
  o.from = AntennaId(from);
  o.to = AntennaId(to);
  o.baseline = b;
  o.covariance = 2 * sigma * sigma * Mat3::Identity();
  return o;
}

EpochProblem consistent_problem(const AntennaStateVector& truth) {
  EpochProblem p;
  for (int i = 1; i <= 4; ++i) p.clas.push_back(clas(i, truth[AntennaId(i)]));
  for (int from = 2; from <= 4; ++from) {
    for (int to = 1; to < from; ++to) {
      p.baselines.push_back(baseline(from, to, truth[AntennaId(from)] - truth[AntennaId(to)]));
    }
  }
  p.prior = BaselinePrior{kCfg.length_front, kCfg.length_rear, 1e-4};
  return p;
}

double max_antenna_error(const AntennaStateVector& a, const AntennaStateVector& b) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max(m, (a.positions[i] - b.positions[i]).norm());
  return m;
}

TEST(Observability, FourClasFixesIsWellPosed) {
  EpochProblem p;
  for (int i = 1; i <= 4; ++i) p.clas.push_back(clas(i, Vec3::Zero()));
  EXPECT_TRUE(observability_check(p).well_posed);
}

TEST(Observability, BaselinesAloneLeaveTranslationFree) {
  EpochProblem p;
  for (int from = 2; from <= 4; ++from) {
    for (int to = 1; to < from; ++to) p.baselines.push_back(baseline(from, to, Vec3(1, 0, 0)));
  }
  const auto obs = observability_check(p);
  EXPECT_FALSE(obs.well_posed);
  EXPECT_EQ(obs.free_antennas.size(), 4u);
  EXPECT_FALSE(obs.describe().empty());
}

TEST(Observability, TwoClasPlusSectionBaselines) {
  const auto truth = vehicle::place_antennas(Vec3(3, 4, 0), 0.4, 0.2, kCfg);
  EpochProblem p;
  p.clas.push_back(clas(1, truth[AntennaId(1)]));
  p.clas.push_back(clas(3, truth[AntennaId(3)]));
  p.baselines.push_back(baseline(2, 1, truth[AntennaId(2)] - truth[AntennaId(1)]));
  p.baselines.push_back(baseline(4, 3, truth[AntennaId(4)] - truth[AntennaId(3)]));
  EXPECT_TRUE(observability_check(p).well_posed);

  // Independent check: the stacked Jacobian of those four factors has rank 12.
  Eigen::Matrix<double, 12, 12> j = Eigen::Matrix<double, 12, 12>::Zero();
  j.block<3, 3>(0, 0) = Mat3::Identity();
  j.block<3, 3>(3, 6) = Mat3::Identity();
  j.block<3, 3>(6, 3) = Mat3::Identity();
  j.block<3, 3>(6, 0) = -Mat3::Identity();
  j.block<3, 3>(9, 9) = Mat3::Identity();
  j.block<3, 3>(9, 6) = -Mat3::Identity();
  using Mat12 = Eigen::Matrix<double, 12, 12>;
  EXPECT_EQ(Eigen::FullPivLU<Mat12>(j).rank(), 12);
}

TEST(Observability, UnfixedBaselineDoesNotConnect) {
  EpochProblem p;
  p.clas.push_back(clas(1, Vec3::Zero()));
  p.clas.push_back(clas(3, Vec3::Zero()));
  p.clas.push_back(clas(4, Vec3::Zero()));
  auto b = baseline(2, 1, Vec3(2.8, 0, 0));
  b.fixed = false;
  p.baselines.push_back(b);
  const auto obs = observability_check(p);
  EXPECT_FALSE(obs.well_posed);
  ASSERT_EQ(obs.free_antennas.size(), 1u);
  EXPECT_EQ(obs.free_antennas[0], AntennaId(2));
}

TEST(Solve, ZeroNoiseRecoversTruth) {
  Gen gen(10);
  for (int trial = 0; trial < 50; ++trial) {
    const auto truth = vehicle::place_antennas(gen.vec(-100, 100), gen.uniform(-kPi, kPi),
                                               gen.uniform(-kPi, kPi), kCfg);
    const auto result = solve_epoch(consistent_problem(truth), SolverSettings{});
    EXPECT_TRUE(result.report.converged);
    EXPECT_LT(max_antenna_error(result.state, truth), 1e-9);
  }
}

TEST(Solve, WeightedMeanOfTwoFixes) {
  EpochProblem p;
  p.clas.push_back(clas(1, Vec3(0, 0, 0), 1.0));
  p.clas.push_back(clas(1, Vec3(0.02, 0, 0), 1.0));
  for (int i = 2; i <= 4; ++i) p.clas.push_back(clas(i, Vec3(i, 0, 0)));
  const auto r = solve_epoch(p, SolverSettings{});
  EXPECT_LT((r.state[AntennaId(1)] - Vec3(0.01, 0, 0)).norm(), 1e-12);
}

// Without length priors the problem is linear: compare against the normal
// equations assembled independently here.
TEST(Solve, LinearProblemMatchesNormalEquations) {
  Gen gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto epoch = artnav::testing::random_epoch(gen, kCfg);
    epoch.problem.prior.reset();
    SolverSettings s;
    s.robust_clas = false;
    const auto r = solve_epoch(epoch.problem, s);

    Eigen::Matrix<double, 12, 12> h = Eigen::Matrix<double, 12, 12>::Zero();
    Eigen::Matrix<double, 12, 1> rhs = Eigen::Matrix<double, 12, 1>::Zero();
    for (const auto& c : epoch.problem.clas) {
      const auto i = 3 * static_cast<int>(c.antenna.index());
      const Mat3 w = c.covariance.inverse();
      h.block<3, 3>(i, i) += w;
      rhs.segment<3>(i) += w * c.position;
    }
    for (const auto& b : epoch.problem.baselines) {
      const auto f = 3 * static_cast<int>(b.from.index());
      const auto t = 3 * static_cast<int>(b.to.index());
      const Mat3 w = b.covariance.inverse();
      h.block<3, 3>(f, f) += w;
      h.block<3, 3>(t, t) += w;
      h.block<3, 3>(f, t) -= w;
      h.block<3, 3>(t, f) -= w;
      rhs.segment<3>(f) += w * b.baseline;
      rhs.segment<3>(t) -= w * b.baseline;
    }
    const Eigen::Matrix<double, 12, 1> x = h.fullPivLu().solve(rhs);
    EXPECT_LT((r.state.stacked() - x).norm(), 1e-10);
  }
}

TEST(Solve, CostIsMonotone) {
  Gen gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto epoch = artnav::testing::random_epoch(gen, kCfg, trial % 2 == 0);
    AntennaStateVector start = epoch.truth;
    for (auto& p : start.positions) p += gen.vec(-2, 2);
    epoch.problem.initial_guess = start;
    const auto r = solve_epoch(epoch.problem, SolverSettings{});
    const auto& hist = r.report.cost_history;
    ASSERT_FALSE(hist.empty());
    for (std::size_t k = 1; k < hist.size(); ++k) EXPECT_LE(hist[k], hist[k - 1]);
    EXPECT_DOUBLE_EQ(r.report.final_cost, hist.back());
    EXPECT_NEAR(r.report.final_cost, evaluate_cost(epoch.problem, SolverSettings{}, r.state),
                1e-9 * std::max(1.0, r.report.final_cost));
  }
}

TEST(Solve, MatchesDenseOracle) {
  Gen gen(13);
  for (int trial = 0; trial < 25; ++trial) {
    const auto epoch = artnav::testing::random_epoch(gen, kCfg, trial % 3 == 0);
    const auto r = solve_epoch(epoch.problem, SolverSettings{});
    const auto oracle = artnav::testing::dense_oracle(epoch.problem, 1.345, true, gen, 5);
    EXPECT_TRUE(r.report.converged);
    EXPECT_LT(max_antenna_error(r.state, oracle.state), 1e-6) << "trial " << trial;
  }
}

TEST(Solve, HuberBoundsInfluence) {
  const auto truth = vehicle::place_antennas(Vec3::Zero(), 0.3, 0.1, kCfg);
  auto shift = [&](double t, bool robust) {
    auto p = consistent_problem(truth);
    p.clas[0].position += Vec3(t, 0, 0);
    SolverSettings s;
    s.robust_clas = robust;
    const auto r = solve_epoch(p, s);
    EXPECT_TRUE(r.report.converged) << "t=" << t << " robust=" << robust;
    return (r.state[AntennaId(1)] - truth[AntennaId(1)]).norm();
  };
  const double r1 = shift(1.0, true);
  const double r100 = shift(100.0, true);
  const double q1 = shift(1.0, false);
  const double q100 = shift(100.0, false);
  EXPECT_NEAR(q100 / q1, 100.0, 0.1);  // linear up to the length-prior curvature
  EXPECT_LT(r100, 0.05);
  EXPECT_LT(r100 / r1, 1.01);
}

TEST(Solve, PermutingFactorsDoesNotChangeSolution) {
  Gen gen(14);
  for (int trial = 0; trial < 30; ++trial) {
    auto epoch = artnav::testing::random_epoch(gen, kCfg, true);
    const auto a = solve_epoch(epoch.problem, SolverSettings{});
    std::shuffle(epoch.problem.clas.begin(), epoch.problem.clas.end(), gen.engine());
    std::shuffle(epoch.problem.baselines.begin(), epoch.problem.baselines.end(), gen.engine());
    const auto b = solve_epoch(epoch.problem, SolverSettings{});
    EXPECT_LT(max_antenna_error(a.state, b.state), 1e-9);
  }
}

TEST(Solve, ReversedBaselineIsEquivalent) {
  Gen gen(15);
  auto epoch = artnav::testing::random_epoch(gen, kCfg);
  const auto a = solve_epoch(epoch.problem, SolverSettings{});
  for (auto& b : epoch.problem.baselines) {
    std::swap(b.from, b.to);
    b.baseline = -b.baseline;
  }
  const auto b = solve_epoch(epoch.problem, SolverSettings{});
  EXPECT_LT(max_antenna_error(a.state, b.state), 1e-9);
}

TEST(Solve, TranslationEquivariance) {
  Gen gen(16);
  auto epoch = artnav::testing::random_epoch(gen, kCfg, true);
  const auto a = solve_epoch(epoch.problem, SolverSettings{});
  const Vec3 shift(123.0, -45.0, 6.0);
  for (auto& c : epoch.problem.clas) c.position += shift;
  const auto b = solve_epoch(epoch.problem, SolverSettings{});
  for (int i = 0; i < 4; ++i) {
    EXPECT_LT((b.state.positions[i] - a.state.positions[i] - shift).norm(), 1e-8);
  }
}

TEST(Solve, LengthPriorIsSatisfied) {
  Gen gen(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto epoch = artnav::testing::random_epoch(gen, kCfg);
    epoch.problem.baselines.clear();
    // Consistent to 5 cm at most.
    for (auto& c : epoch.problem.clas) {
      c.position = epoch.truth[c.antenna] + gen.vec(-0.05, 0.05) / std::sqrt(3.0);
    }
    const auto r = solve_epoch(epoch.problem, SolverSettings{});
    ASSERT_TRUE(r.report.converged);
    EXPECT_LT(std::abs((r.state[AntennaId(2)] - r.state[AntennaId(1)]).norm() - kCfg.length_front), 0.02);
    EXPECT_LT(std::abs((r.state[AntennaId(4)] - r.state[AntennaId(3)]).norm() - kCfg.length_rear), 0.02);
  }
}

TEST(Solve, UnobservableIsReported) {
  EpochProblem p;
  p.clas.push_back(clas(1, Vec3::Zero()));
  EXPECT_THROW((void)solve_epoch(p, SolverSettings{}), UnobservableProblem);
}

TEST(Solve, MalformedInputIsDataError) {
  const auto truth = vehicle::place_antennas(Vec3::Zero(), 0.0, 0.0, kCfg);
  auto p = consistent_problem(truth);
  p.baselines.front().to = p.baselines.front().from;
  EXPECT_THROW((void)solve_epoch(p, SolverSettings{}), DataError);

  p = consistent_problem(truth);
  p.clas.front().covariance(0, 0) = -1.0;
  EXPECT_THROW((void)solve_epoch(p, SolverSettings{}), DataError);

  p = consistent_problem(truth);
  p.clas.front().position.x() = std::nan("");
  EXPECT_THROW((void)solve_epoch(p, SolverSettings{}), DataError);
}

TEST(Solve, DegenerateLengthFactorIsDroppedAndFlagged) {
  EpochProblem p;
  for (int i = 1; i <= 4; ++i) p.clas.push_back(clas(i, Vec3::Zero(), 0.01));
  p.prior = BaselinePrior{kCfg.length_front, kCfg.length_rear, 1e-4};
  AntennaStateVector start;  // all antennas coincident
  p.initial_guess = start;
  const auto r = solve_epoch(p, SolverSettings{});
  EXPECT_TRUE(r.report.degenerate_length_dropped);
  EXPECT_TRUE(r.state.all_finite());
}

TEST(Solve, InvalidSettingsAreConfigErrors) {
  SolverSettings s;
  s.max_iterations = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = SolverSettings{};
  s.step_tolerance = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

}  // namespace
}  // namespace artnav::graph

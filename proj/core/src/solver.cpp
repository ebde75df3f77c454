#include "artnav/solver.hpp"

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "artnav/factors.hpp"

namespace artnav::graph {

namespace {

using StateVec = Eigen::Matrix<double, kStateDim, 1>;
using StateMat = Eigen::Matrix<double, kStateDim, kStateDim>;

constexpr AntennaId kA1{1};
constexpr AntennaId kA2{2};
constexpr AntennaId kA3{3};
constexpr AntennaId kA4{4};

// Factors with information matrices precomputed once per solve.
struct PreparedClas {
  const ClasFix* fix;
  Mat3 information;
  Mat3 sqrt_information;  // L' with information = L L'
};

struct PreparedBaseline {
  const BaselineObservation* obs;
  Mat3 information;
};

struct PreparedLength {
  AntennaId a;
  AntennaId b;
  double length;
  double information;
  bool active = true;
};

struct Graph {
  std::vector<PreparedClas> clas;
  std::vector<PreparedBaseline> baselines;
  std::vector<PreparedLength> lengths;
};

Mat3 information_of(const Mat3& covariance) {
  return covariance.llt().solve(Mat3::Identity());
}

Graph prepare(const EpochProblem& problem) {
  Graph g;
  for (const auto& fix : problem.clas) {
    if (!fix.admitted()) continue;
    const Mat3 info = information_of(fix.covariance);
    const Mat3 l = info.llt().matrixL();
    g.clas.push_back({&fix, info, l.transpose()});
  }
  for (const auto& obs : problem.baselines) {
    if (!obs.fixed) continue;
    g.baselines.push_back({&obs, information_of(obs.covariance)});
  }
  if (problem.prior) {
    const double info = 1.0 / problem.prior->variance;
    g.lengths.push_back({kA1, kA2, problem.prior->length_front, info});
    g.lengths.push_back({kA3, kA4, problem.prior->length_rear, info});
  }
  return g;
}

double clas_whitened(const PreparedClas& f, const Vec3& e) {
  return (f.sqrt_information * e).norm();
}

double robust_cost(const Graph& g, const SolverSettings& settings, const AntennaStateVector& x) {
  double cost = 0.0;
  for (const auto& f : g.clas) {
    const double s = clas_whitened(f, x[f.fix->antenna] - f.fix->position);
    cost += settings.robust_clas ? huber_cost(s, settings.huber_delta) : s * s;
  }
  for (const auto& f : g.baselines) {
    const Vec3 e = x[f.obs->from] - x[f.obs->to] - f.obs->baseline;
    cost += e.dot(f.information * e);
  }
  for (const auto& f : g.lengths) {
    if (!f.active) continue;
    const double dist = (x[f.b] - x[f.a]).norm();
    if (dist < kMinBaselineSeparation) continue;
    const double e = dist - f.length;
    cost += f.information * e * e;
  }
  return cost;
}

template <typename Block>
void add_block(StateMat& h, AntennaId r, AntennaId c, const Block& block) {
  h.block<3, 3>(3 * static_cast<int>(r.index()), 3 * static_cast<int>(c.index())) += block;
}

void add_segment(StateVec& v, AntennaId r, const Vec3& seg) {
  v.segment<3>(3 * static_cast<int>(r.index())) += seg;
}

// Assembles H = sum J' W J and g = sum J' W e at `x`, with robust weights of
// the CLAS factors evaluated at `x` and frozen for this iteration.
//
// `h_newton` differs from `h` only for CLAS factors in the linear part of the
// kernel: there the exact Huber curvature drops the radial direction of the
// whitened residual. Same gradient, so same fixed points, but it converges
// quadratically where the frozen-weight system creeps linearly.
void assemble(Graph& g, const SolverSettings& settings, const AntennaStateVector& x,
              StateMat& h, StateMat& h_newton, StateVec& grad, bool& dropped_length) {
  h.setZero();
  h_newton.setZero();
  grad.setZero();
  for (const auto& f : g.clas) {
    const Vec3 e = x[f.fix->antenna] - f.fix->position;
    const Vec3 r = f.sqrt_information * e;
    const double s = r.norm();
    const double w = settings.robust_clas ? huber_weight(s, settings.huber_delta) : 1.0;
    const Mat3 wi = w * f.information;
    add_block(h, f.fix->antenna, f.fix->antenna, wi);
    add_segment(grad, f.fix->antenna, wi * e);
    if (w < 1.0) {
      const Vec3 u = f.sqrt_information.transpose() * (r / s);
      add_block(h_newton, f.fix->antenna, f.fix->antenna, Mat3(-w * u * u.transpose()));
    }
  }
  for (const auto& f : g.baselines) {
    const AntennaId from = f.obs->from;
    const AntennaId to = f.obs->to;
    const Vec3 e = x[from] - x[to] - f.obs->baseline;
    add_block(h, from, from, f.information);
    add_block(h, to, to, f.information);
    add_block(h, from, to, -f.information);
    add_block(h, to, from, -f.information);
    add_segment(grad, from, f.information * e);
    add_segment(grad, to, -(f.information * e));
  }
  for (auto& f : g.lengths) {
    if (!f.active) continue;
    if ((x[f.b] - x[f.a]).norm() < kMinBaselineSeparation) {
      f.active = false;
      dropped_length = true;
      continue;
    }
    const auto lin = linearize_baseline_length(x[f.a], x[f.b], f.length);
    const Mat3 aa = f.information * lin.d_xa.transpose() * lin.d_xa;
    const Mat3 ab = f.information * lin.d_xa.transpose() * lin.d_xb;
    const Mat3 bb = f.information * lin.d_xb.transpose() * lin.d_xb;
    add_block(h, f.a, f.a, aa);
    add_block(h, f.a, f.b, ab);
    add_block(h, f.b, f.a, ab.transpose());
    add_block(h, f.b, f.b, bb);
    add_segment(grad, f.a, f.information * lin.residual * lin.d_xa.transpose());
    add_segment(grad, f.b, f.information * lin.residual * lin.d_xb.transpose());
  }
  h_newton += h;
}

std::vector<FactorResidual> final_residuals(const Graph& g, const SolverSettings& settings,
                                            const AntennaStateVector& x) {
  std::vector<FactorResidual> out;
  out.reserve(g.clas.size() + g.baselines.size() + g.lengths.size());
  for (const auto& f : g.clas) {
    FactorResidual r;
    r.kind = FactorKind::kClas;
    r.first = r.second = f.fix->antenna;
    r.residual = clas_residual(x[f.fix->antenna], *f.fix);
    r.whitened_norm = clas_whitened(f, r.residual);
    r.weight = settings.robust_clas ? huber_weight(r.whitened_norm, settings.huber_delta) : 1.0;
    out.push_back(r);
  }
  for (const auto& f : g.baselines) {
    FactorResidual r;
    r.kind = FactorKind::kMovingBase;
    r.first = f.obs->from;
    r.second = f.obs->to;
    r.residual = mvrtk_residual(x[f.obs->from], x[f.obs->to], *f.obs);
    r.whitened_norm = std::sqrt(r.residual.dot(f.information * r.residual));
    out.push_back(r);
  }
  for (const auto& f : g.lengths) {
    if (!f.active) continue;
    FactorResidual r;
    r.kind = FactorKind::kBaselineLength;
    r.first = f.a;
    r.second = f.b;
    r.residual = Vec3::Zero();
    r.residual[0] = (x[f.b] - x[f.a]).norm() - f.length;
    r.whitened_norm = std::abs(r.residual[0]) * std::sqrt(f.information);
    out.push_back(r);
  }
  return out;
}

int factor_count(const EpochProblem& problem, AntennaId id) {
  int n = 0;
  for (const auto& fix : problem.clas) n += (fix.admitted() && fix.antenna == id) ? 1 : 0;
  for (const auto& obs : problem.baselines) {
    n += (obs.fixed && (obs.from == id || obs.to == id)) ? 1 : 0;
  }
  return n;
}

}  // namespace

AntennaStateVector build_initial_guess(const EpochProblem& problem,
                                       const std::optional<AntennaStateVector>& previous) {
  if (previous) return *previous;

  AntennaStateVector out;
  std::array<bool, kAntennaCount> seeded{};
  for (const auto& fix : problem.clas) {
    const auto i = fix.antenna.index();
    if (fix.admitted() && !seeded[i]) {
      out.positions[i] = fix.position;
      seeded[i] = true;
    }
  }
  // Propagate through fixed baselines until nothing changes.
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& obs : problem.baselines) {
      if (!obs.fixed) continue;
      const auto f = obs.from.index();
      const auto t = obs.to.index();
      if (seeded[t] && !seeded[f]) {
        out.positions[f] = out.positions[t] + obs.baseline;
        seeded[f] = changed = true;
      } else if (seeded[f] && !seeded[t]) {
        out.positions[t] = out.positions[f] - obs.baseline;
        seeded[t] = changed = true;
      }
    }
  }
  const double front = problem.prior ? problem.prior->length_front : 1.0;
  const double rear = problem.prior ? problem.prior->length_rear : 1.0;
  const std::array<std::pair<std::size_t, double>, kAntennaCount> partner = {
      {{1, -front}, {0, front}, {3, -rear}, {2, rear}}};
  for (std::size_t i = 0; i < kAntennaCount; ++i) {
    if (seeded[i]) continue;
    const auto [p, offset] = partner[i];
    if (!seeded[p]) {
      throw UnobservableProblem("cannot seed antenna " + std::to_string(i + 1) +
                                ": no previous state, CLAS fix or fixed baseline");
    }
    out.positions[i] = out.positions[p] + Vec3(offset, 0.0, 0.0);
  }
  return out;
}

double evaluate_cost(const EpochProblem& problem, const SolverSettings& settings,
                     const AntennaStateVector& state) {
  return robust_cost(prepare(problem), settings, state);
}

SolveResult solve_epoch(const EpochProblem& problem, const SolverSettings& settings) {
  settings.validate();
  validate(problem);

  const auto observability = observability_check(problem);
  if (!observability.well_posed) throw UnobservableProblem(observability.describe());
  for (int i = 0; i < kAntennaCount; ++i) {
    const auto id = AntennaId::from_index(static_cast<std::size_t>(i));
    if (factor_count(problem, id) < settings.min_factor_count_per_antenna) {
      throw UnobservableProblem("antenna " + std::to_string(id.number()) + " has fewer than " +
                                std::to_string(settings.min_factor_count_per_antenna) +
                                " factors");
    }
  }

  SolveResult result;
  SolveReport& report = result.report;
  for (const auto& fix : problem.clas) {
    report.clas_fix_count += fix.status == FixStatus::kFix ? 1 : 0;
    report.clas_float_count += fix.status == FixStatus::kFloat ? 1 : 0;
  }
  for (const auto& obs : problem.baselines) report.fixed_baseline_count += obs.fixed ? 1 : 0;

  Graph g = prepare(problem);
  AntennaStateVector x = build_initial_guess(problem, problem.initial_guess);
  if (!x.all_finite()) throw DataError("initial guess is not finite");

  StateMat h;
  StateMat h_newton;
  StateVec grad;
  double cost = robust_cost(g, settings, x);
  report.cost_history.push_back(cost);

  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    bool dropped = false;
    assemble(g, settings, x, h, h_newton, grad, dropped);
    if (dropped) {
      report.degenerate_length_dropped = true;
      cost = robust_cost(g, settings, x);
    }
    ++report.iterations;

    const Eigen::SelfAdjointEigenSolver<StateMat> eig(h, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > hi * 1e-14) || !(hi > 0.0)) {
      throw SingularSystem("normal equations are rank deficient (eigenvalue ratio " +
                           std::to_string(hi > 0.0 ? lo / hi : 0.0) + ")");
    }

    // Halve `step` until the robust cost does not increase.
    auto line_search = [&](const StateVec& step) {
      double scale = 1.0;
      for (int k = 0; k <= settings.max_step_halvings; ++k, scale *= 0.5) {
        const auto candidate = AntennaStateVector::from_stacked(x.stacked() + scale * step);
        const double candidate_cost = robust_cost(g, settings, candidate);
        if (candidate_cost <= cost) {
          x = candidate;
          cost = candidate_cost;
          return true;
        }
        if (step.norm() < settings.step_tolerance) break;
      }
      return false;
    };

    StateVec step = StateVec::Zero();
    bool accepted = false;
    if (h_newton != h) {
      const Eigen::SelfAdjointEigenSolver<StateMat> eig_n(h_newton, Eigen::EigenvaluesOnly);
      if (eig_n.eigenvalues().minCoeff() > eig_n.eigenvalues().maxCoeff() * 1e-10) {
        step = -h_newton.ldlt().solve(grad);
        accepted = line_search(step);
      }
    }
    if (!accepted) {
      step = -h.ldlt().solve(grad);
      accepted = line_search(step);
    }
    if (accepted) report.cost_history.push_back(cost);
    if (step.norm() < settings.step_tolerance) {
      report.converged = true;
      break;
    }
    if (!accepted) break;
  }

  report.final_cost = cost;
  report.residuals = final_residuals(g, settings, x);
  result.state = x;
  return result;
}

}  // namespace artnav::graph

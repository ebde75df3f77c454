#include "support.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace artnav::testing {

namespace {

using Dyn = Eigen::VectorXd;
using DynMat = Eigen::MatrixXd;

// Whitening operator W with W'W = inverse(covariance).
Mat3 whitener(const Mat3& covariance) {
  const Mat3 l = covariance.llt().matrixL();
  return l.inverse();
}

Dyn residual_vector(const graph::EpochProblem& p, double delta, bool robust,
                    const Eigen::Matrix<double, 12, 1>& v) {
  auto pos = [&](AntennaId id) -> Vec3 { return v.segment<3>(3 * static_cast<int>(id.index())); };
  std::vector<double> out;
  for (const auto& c : p.clas) {
    if (c.status == graph::FixStatus::kNone) continue;
    const Vec3 r = whitener(c.covariance) * (pos(c.antenna) - c.position);
    const double s = r.norm();
    // sqrt(rho(s)) * r / s reproduces the Huber cost as a squared norm.
    const double scale = (!robust || s <= delta) ? 1.0 : std::sqrt(2.0 * delta * s - delta * delta) / s;
    for (int k = 0; k < 3; ++k) out.push_back(scale * r[k]);
  }
  for (const auto& b : p.baselines) {
    if (!b.fixed) continue;
    const Vec3 r = whitener(b.covariance) * (pos(b.from) - pos(b.to) - b.baseline);
    for (int k = 0; k < 3; ++k) out.push_back(r[k]);
  }
  if (p.prior) {
    const double w = 1.0 / std::sqrt(p.prior->variance);
    out.push_back(w * ((pos(AntennaId(2)) - pos(AntennaId(1))).norm() - p.prior->length_front));
    out.push_back(w * ((pos(AntennaId(4)) - pos(AntennaId(3))).norm() - p.prior->length_rear));
  }
  return Eigen::Map<Dyn>(out.data(), static_cast<Eigen::Index>(out.size()));
}

}  // namespace

Mat3 Gen::covariance(double lo, double hi) {
  const Eigen::Quaterniond q(normal(1.0), normal(1.0), normal(1.0), normal(1.0));
  const Mat3 r = q.normalized().toRotationMatrix();
  const Vec3 s(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
  return r * s.cwiseAbs2().asDiagonal() * r.transpose();
}

RandomEpoch random_epoch(Gen& gen, const vehicle::VehicleConfig& cfg, bool outlier) {
  RandomEpoch out;
  const Vec3 center(gen.uniform(-50, 50), gen.uniform(-50, 50), gen.uniform(-2, 2));
  const double front = gen.uniform(-kPi, kPi);
  const double rear = front - gen.uniform(-deg2rad(40), deg2rad(40));
  out.truth = vehicle::place_antennas(center, front, rear, cfg);

  auto& p = out.problem;
  for (int i = 0; i < kAntennaCount; ++i) {
    graph::ClasFix fix;
    fix.antenna = AntennaId::from_index(static_cast<std::size_t>(i));
    fix.covariance = gen.covariance(0.01, 0.04);
    fix.position = out.truth.positions[static_cast<std::size_t>(i)] + gen.normal3(0.02);
    fix.status = gen.uniform(0, 1) < 0.8 ? graph::FixStatus::kFix : graph::FixStatus::kFloat;
    p.clas.push_back(fix);
  }
  if (outlier) p.clas[static_cast<std::size_t>(gen.integer(0, 3))].position += gen.vec(-1, 1);
  for (int from = 2; from <= 4; ++from) {
    for (int to = 1; to < from; ++to) {
      graph::BaselineObservation b;
      b.from = AntennaId(from);
      b.to = AntennaId(to);
      b.covariance = gen.covariance(0.002, 0.006);
      b.baseline = out.truth[b.from] - out.truth[b.to] + gen.normal3(0.004);
      p.baselines.push_back(b);
    }
  }
  p.prior = graph::BaselinePrior{cfg.length_front, cfg.length_rear, 1e-4};
  return out;
}

double oracle_cost(const graph::EpochProblem& problem, double huber_delta, bool robust,
                   const AntennaStateVector& x) {
  return residual_vector(problem, huber_delta, robust, x.stacked()).squaredNorm();
}

OracleResult dense_oracle(const graph::EpochProblem& problem, double huber_delta, bool robust,
                          Gen& gen, int restarts, int iterations) {
  using V = Eigen::Matrix<double, 12, 1>;
  auto f = [&](const V& v) { return residual_vector(problem, huber_delta, robust, v); };

  // Restarts scatter around the average of the admitted fixes.
  Vec3 mean = Vec3::Zero();
  int n = 0;
  for (const auto& c : problem.clas) {
    if (c.status != graph::FixStatus::kNone) {
      mean += c.position;
      ++n;
    }
  }
  mean /= std::max(n, 1);

  OracleResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    V v;
    for (int i = 0; i < 4; ++i) v.segment<3>(3 * i) = mean + gen.vec(-4, 4);
    Dyn fv = f(v);
    double cost = fv.squaredNorm();
    double lambda = 1e-3;
    for (int it = 0; it < iterations; ++it) {
      DynMat jac(fv.size(), 12);
      for (int k = 0; k < 12; ++k) {
        const double h = 1e-7 * std::max(1.0, std::abs(v[k]));
        V lo = v;
        V hi = v;
        lo[k] -= h;
        hi[k] += h;
        jac.col(k) = (f(hi) - f(lo)) / (2.0 * h);
      }
      const DynMat jtj = jac.transpose() * jac;
      const Dyn g = jac.transpose() * fv;
      bool improved = false;
      double step_norm = 0.0;
      for (int tries = 0; tries < 30 && !improved; ++tries) {
        DynMat a = jtj;
        a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
        const V step = -a.ldlt().solve(g);
        const V cand = v + step;
        const Dyn fc = f(cand);
        const double cc = fc.squaredNorm();
        if (cc <= cost) {
          step_norm = step.norm();
          v = cand;
          fv = fc;
          cost = cc;
          lambda = std::max(lambda * 0.3, 1e-12);
          improved = true;
        } else {
          lambda *= 10.0;
        }
      }
      if (!improved || (step_norm < 1e-13 && lambda < 1e-2)) break;
    }
    if (cost < best.cost) {
      best.cost = cost;
      best.state = AntennaStateVector::from_stacked(v);
    }
  }
  return best;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("artnav_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace artnav::testing

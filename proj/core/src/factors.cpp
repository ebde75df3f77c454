#include "artnav/factors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

namespace artnav::graph {

std::string_view to_string(FixStatus status) {
  switch (status) {
    case FixStatus::kNone: return "none";
    case FixStatus::kFloat: return "float";
    case FixStatus::kFix: return "fix";
  }
  return "none";
}

FixStatus parse_fix_status(std::string_view text) {
  if (text == "fix") return FixStatus::kFix;
  if (text == "float") return FixStatus::kFloat;
  if (text == "none") return FixStatus::kNone;
  throw DataError("unknown fix status '" + std::string(text) + "'");
}

int BaselineObservation::pair_id() const {
  const int lo = std::min(from.number(), to.number());
  const int hi = std::max(from.number(), to.number());
  static constexpr int kOffset[] = {0, 0, 3, 5};  // first id for lo = 1, 2, 3
  if (lo == hi) throw DataError("baseline joins antenna " + std::to_string(lo) + " to itself");
  return kOffset[lo] + (hi - lo);
}

namespace {

bool is_spd(const Mat3& m) {
  if (!m.allFinite() || !m.isApprox(m.transpose(), 1e-12)) return false;
  Eigen::LLT<Mat3> llt(m);
  return llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0;
}

}  // namespace

void SolverSettings::validate() const {
  if (max_iterations < 1) throw ConfigError("solver.max_iterations must be >= 1");
  if (!(step_tolerance > 0.0)) throw ConfigError("solver.step_tolerance must be > 0");
  if (!(huber_delta > 0.0)) throw ConfigError("solver.huber_delta must be > 0");
  if (min_factor_count_per_antenna < 0) {
    throw ConfigError("solver.min_factor_count_per_antenna must be >= 0");
  }
  if (max_step_halvings < 0) throw ConfigError("solver.max_step_halvings must be >= 0");
}

void validate(const EpochProblem& problem) {
  for (const auto& fix : problem.clas) {
    if (!fix.position.allFinite()) {
      throw DataError("CLAS fix of antenna " + std::to_string(fix.antenna.number()) +
                      " has non-finite position");
    }
    if (fix.admitted() && !is_spd(fix.covariance)) {
      throw DataError("CLAS fix of antenna " + std::to_string(fix.antenna.number()) +
                      " has a covariance that is not symmetric positive definite");
    }
  }
  for (const auto& obs : problem.baselines) {
    (void)obs.pair_id();
    if (!obs.baseline.allFinite()) throw DataError("baseline has non-finite components");
    if (obs.fixed && !is_spd(obs.covariance)) {
      throw DataError("baseline " + std::to_string(obs.from.number()) + "-" +
                      std::to_string(obs.to.number()) +
                      " has a covariance that is not symmetric positive definite");
    }
  }
  if (problem.prior) {
    if (!(problem.prior->length_front > 0.0)) throw DataError("prior L12 must be > 0");
    if (!(problem.prior->length_rear > 0.0)) throw DataError("prior L34 must be > 0");
    if (!(problem.prior->variance > 0.0)) throw DataError("prior variance must be > 0");
  }
}

Vec3 clas_residual(const EnuPosition& x, const ClasFix& fix) {
  if (!fix.admitted()) {
    throw FactorRejected("CLAS fix of antenna " + std::to_string(fix.antenna.number()) +
                         " has status none");
  }
  return x - fix.position;
}

Vec3 mvrtk_residual(const EnuPosition& x_from, const EnuPosition& x_to,
                    const BaselineObservation& obs) {
  if (!obs.fixed) {
    throw FactorRejected("moving-base baseline " + std::to_string(obs.from.number()) + "-" +
                         std::to_string(obs.to.number()) + " is not ambiguity fixed");
  }
  return x_from - x_to - obs.baseline;
}

double baseline_length_residual(const EnuPosition& xa, const EnuPosition& xb, double length) {
  return linearize_baseline_length(xa, xb, length).residual;
}

LengthLinearization linearize_baseline_length(const EnuPosition& xa, const EnuPosition& xb,
                                              double length) {
  if (!(length > 0.0)) throw DataError("baseline length must be > 0");
  const Vec3 d = xb - xa;
  const double dist = d.norm();
  if (dist < kMinBaselineSeparation) {
    throw DegenerateGeometry("antennas closer than 1e-6 m; length factor undefined");
  }
  const Eigen::RowVector3d unit = (d / dist).transpose();
  return {dist - length, -unit, unit};
}

double huber_weight(double whitened_norm, double delta) {
  return whitened_norm <= delta ? 1.0 : delta / whitened_norm;
}

double huber_cost(double whitened_norm, double delta) {
  if (whitened_norm <= delta) return whitened_norm * whitened_norm;
  return 2.0 * delta * whitened_norm - delta * delta;
}

double whitened_norm(const Vec3& residual, const Mat3& covariance) {
  const Vec3 z = covariance.llt().matrixL().solve(residual);
  return z.norm();
}

}  // namespace artnav::graph

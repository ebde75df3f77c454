#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "artnav/factor_graph.hpp"
#include "artnav/vehicle_model.hpp"

namespace artnav::testing {

/// Small deterministic generator for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(engine_); }
  Vec3 vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  Vec3 normal3(double sigma) { return {normal(sigma), normal(sigma), normal(sigma)}; }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  /// Random SPD covariance with per-axis sigmas in [lo, hi] and a random rotation.
  Mat3 covariance(double lo, double hi);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct RandomEpoch {
  AntennaStateVector truth;
  graph::EpochProblem problem;
};

/// Four CLAS fixes, six fixed baselines and both length priors around a random
/// vehicle pose. `outlier` adds a gross error to one CLAS fix.
RandomEpoch random_epoch(Gen& gen, const vehicle::VehicleConfig& cfg, bool outlier = false);

/// Independent reference: Levenberg-Marquardt on the stacked robustified
/// residual vector with central-difference Jacobians, best of several random
/// restarts. Knows nothing about the production solver.
struct OracleResult {
  AntennaStateVector state;
  double cost = 0.0;
};
OracleResult dense_oracle(const graph::EpochProblem& problem, double huber_delta, bool robust,
                          Gen& gen, int restarts = 20, int iterations = 200);

/// Robust objective as the oracle sees it.
double oracle_cost(const graph::EpochProblem& problem, double huber_delta, bool robust,
                   const AntennaStateVector& x);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace artnav::testing

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "artnav/types.hpp"

namespace artnav::graph {

enum class FixStatus { kNone, kFloat, kFix };

[[nodiscard]] std::string_view to_string(FixStatus status);
/// Accepts "none", "float", "fix".
[[nodiscard]] FixStatus parse_fix_status(std::string_view text);

/// Absolute PPP-RTK position of one antenna, already expressed in local ENU.
struct ClasFix {
  AntennaId antenna{1};
  EnuPosition position = Vec3::Zero();
  FixStatus status = FixStatus::kFix;
  Mat3 covariance = Mat3::Identity();

  [[nodiscard]] bool admitted() const { return status != FixStatus::kNone; }
};

/// Relative position between two antennas from moving-base RTK.
///
/// `baseline` is x[from] - x[to], i.e. the vector pointing from antenna `to`
/// to antenna `from`. Only observations with `fixed` set enter the graph.
struct BaselineObservation {
  AntennaId from{2};
  AntennaId to{1};
  Vec3 baseline = Vec3::Zero();
  bool fixed = true;
  Mat3 covariance = Mat3::Identity();

  /// 1..6 over the unordered pairs (1,2) (1,3) (1,4) (2,3) (2,4) (3,4).
  [[nodiscard]] int pair_id() const;
};

/// Rigid antenna spacing on each section.
struct BaselinePrior {
  double length_front = 0.0;  // |x2 - x1|
  double length_rear = 0.0;   // |x4 - x3|
  double variance = 1e-4;     // m^2
};

struct SolverSettings {
  int max_iterations = 20;
  double step_tolerance = 1e-8;  // meters, on the stacked step norm
  double huber_delta = 1.345;    // on the whitened residual norm
  bool robust_clas = true;
  int min_factor_count_per_antenna = 1;
  int max_step_halvings = 8;

  /// Throws ConfigError naming the field.
  void validate() const;
};

struct EpochProblem {
  double timestamp = 0.0;
  std::vector<ClasFix> clas;
  std::vector<BaselineObservation> baselines;
  std::optional<BaselinePrior> prior;
  std::optional<AntennaStateVector> initial_guess;
};

/// Throws DataError for non-SPD covariances, self baselines, bad lengths.
void validate(const EpochProblem& problem);

enum class FactorKind { kClas, kMovingBase, kBaselineLength };

struct FactorResidual {
  FactorKind kind = FactorKind::kClas;
  AntennaId first{1};
  AntennaId second{1};  // equals `first` for CLAS factors
  Vec3 residual = Vec3::Zero();  // length factors use component 0
  double whitened_norm = 0.0;
  double weight = 1.0;           // robust weight at the final iterate
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  double final_cost = 0.0;
  std::vector<double> cost_history;  // cost at the start and after each accepted step
  std::vector<FactorResidual> residuals;
  bool degenerate_length_dropped = false;
  int clas_fix_count = 0;
  int clas_float_count = 0;
  int fixed_baseline_count = 0;
};

struct SolveResult {
  AntennaStateVector state;
  SolveReport report;
};

}  // namespace artnav::graph

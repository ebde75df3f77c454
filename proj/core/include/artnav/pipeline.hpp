#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "artnav/config.hpp"
#include "artnav/evaluation.hpp"
#include "artnav/records.hpp"

namespace artnav::pipeline {

/// Stream driver for per-epoch estimation. Owns the warm-start state: the
/// previous epoch's solution seeds the next solve and nothing else carries
/// over between epochs.
class EpochEstimator {
 public:
  explicit EpochEstimator(const RunConfig& cfg);

  /// Solves one epoch. Solver failures are captured in the returned record.
  [[nodiscard]] io::StateRecord process(graph::EpochProblem problem);

  /// Solve time of the last processed epoch, milliseconds.
  [[nodiscard]] double last_solve_ms() const { return last_solve_ms_; }
  [[nodiscard]] const std::optional<graph::SolveReport>& last_report() const {
    return last_report_;
  }

 private:
  vehicle::VehicleConfig vehicle_;
  graph::SolverSettings solver_;
  graph::BaselinePrior prior_;
  Mode mode_;
  double max_warm_gap_;
  std::optional<AntennaStateVector> previous_;
  std::optional<double> previous_time_;
  double last_solve_ms_ = 0.0;
  std::optional<graph::SolveReport> last_report_;
};

/// Applies the run mode and attaches the configured length priors.
[[nodiscard]] graph::EpochProblem prepare_problem(graph::EpochProblem problem, const RunConfig& cfg);

struct SimulateSummary {
  std::size_t epochs = 0;
  std::string truth_path;
  std::string measurements_path;
};

/// Writes truth.jsonl and measurements.jsonl into `out_dir`.
SimulateSummary simulate(const RunConfig& cfg, const std::string& out_dir);

struct EstimateSummary {
  std::size_t epochs = 0;
  std::size_t solved = 0;
  std::size_t converged = 0;
  std::size_t clas_fix = 0;
  std::size_t clas_float = 0;
  std::size_t clas_total = 0;
  std::size_t baselines_fixed = 0;
  std::size_t baselines_total = 0;
  double total_iterations = 0.0;
  double total_solve_ms = 0.0;
  double total_wall_ms = 0.0;

  [[nodiscard]] double mean_iterations() const;
  [[nodiscard]] double mean_solve_ms() const;
  [[nodiscard]] double wall_ms_per_epoch() const;
  [[nodiscard]] std::string describe() const;
};

/// Single pass over a measurement stream; one output line per input epoch.
EstimateSummary estimate(std::istream& measurements, std::ostream& estimates, const RunConfig& cfg);
EstimateSummary estimate_file(const std::string& measurements_path,
                              const std::string& estimates_path, const RunConfig& cfg);

enum class EvaluationKind { kStatic, kKinematic };

struct LabeledFile {
  std::string label;
  std::string path;
};

struct EvaluateOutput {
  eval::Document json;
  eval::Document text;
  std::string csv;
  bool complete = true;
};

/// Builds the report for each labeled estimate file. Static reports use the
/// successfully solved epochs; kinematic reports align to `reference`.
/// A method with no usable data yields "no data" cells and `complete` false.
/// Throws DataError for unreadable files, EvaluationError for alignment
/// failure.
EvaluateOutput evaluate(const std::vector<LabeledFile>& estimates,
                        const std::optional<std::string>& reference, EvaluationKind kind);

/// Vehicle states of the successfully solved records.
[[nodiscard]] std::vector<vehicle::VehicleState> solved_states(
    const std::vector<io::StateRecord>& records);

struct ScenarioPaths {
  std::string truth;
  std::string measurements;
  std::string estimates;
};

/// trajectory -> measurements -> solve -> vehicle state, persisted as
/// truth.jsonl, measurements.jsonl and estimates_<mode>.jsonl in `out_dir`.
ScenarioPaths run_scenario(const RunConfig& cfg, const std::string& out_dir);

}  // namespace artnav::pipeline

#include "artnav/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "artnav/solver.hpp"

namespace artnav::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::optional<geodesy::EnuOrigin> configured_origin(const RunConfig& cfg) {
  if (!cfg.origin) return std::nullopt;
  return geodesy::EnuOrigin(*cfg.origin);
}

}  // namespace

graph::EpochProblem prepare_problem(graph::EpochProblem problem, const RunConfig& cfg) {
  if (cfg.mode == Mode::kClasOnly) problem.baselines.clear();
  problem.prior = graph::BaselinePrior{cfg.vehicle.length_front, cfg.vehicle.length_rear,
                                       cfg.prior_variance};
  return problem;
}

EpochEstimator::EpochEstimator(const RunConfig& cfg)
    : vehicle_(cfg.vehicle),
      solver_(cfg.solver),
      prior_{cfg.vehicle.length_front, cfg.vehicle.length_rear, cfg.prior_variance},
      mode_(cfg.mode),
      // Warm starts older than a few epochs are no better than a cold start.
      max_warm_gap_(5.0 / cfg.vehicle.epoch_rate) {}

io::StateRecord EpochEstimator::process(graph::EpochProblem problem) {
  if (mode_ == Mode::kClasOnly) problem.baselines.clear();
  problem.prior = prior_;
  if (previous_ && previous_time_ && problem.timestamp - *previous_time_ <= max_warm_gap_) {
    problem.initial_guess = previous_;
  }

  io::StateRecord record;
  record.timestamp = problem.timestamp;
  last_report_.reset();
  const auto start = Clock::now();
  try {
    auto result = graph::solve_epoch(problem, solver_);
    last_solve_ms_ = elapsed_ms(start);
    record.state = vehicle::derive_vehicle_state(problem.timestamp, result.state, vehicle_,
                                                 result.report);
    record.antennas = result.state;
    record.iterations = result.report.iterations;
    record.converged = result.report.converged;
    previous_ = result.state;
    previous_time_ = problem.timestamp;
    last_report_ = std::move(result.report);
  } catch (const Error& e) {
    last_solve_ms_ = elapsed_ms(start);
    record.state.reset();
    record.antennas.reset();
    record.error = e.what();
    previous_.reset();
    previous_time_.reset();
  }
  return record;
}

SimulateSummary simulate(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  const auto truth = sim::generate_trajectory(cfg.trajectory, cfg.vehicle);
  std::filesystem::create_directories(out_dir);

  SimulateSummary summary;
  summary.truth_path = join(out_dir, "truth.jsonl");
  summary.measurements_path = join(out_dir, "measurements.jsonl");
  auto truth_out = open_output(summary.truth_path);
  auto meas_out = open_output(summary.measurements_path);

  const auto origin = cfg.measurement_frame == MeasurementFrame::kGeodetic
                          ? configured_origin(cfg)
                          : std::optional<geodesy::EnuOrigin>{};
  sim::MeasurementSynthesizer synth(cfg.noise);
  for (const auto& epoch : truth) {
    io::StateRecord rec;
    rec.timestamp = epoch.timestamp;
    rec.state = epoch.state;
    rec.antennas = epoch.antennas;
    truth_out << io::format_state_record(rec) << '\n';
    meas_out << io::format_measurement_record(synth.synthesize(epoch), origin) << '\n';
  }
  if (!truth_out || !meas_out) throw DataError("write failed in " + out_dir);
  summary.epochs = truth.size();
  return summary;
}

double EstimateSummary::mean_iterations() const {
  return solved ? total_iterations / static_cast<double>(solved) : 0.0;
}

double EstimateSummary::mean_solve_ms() const {
  return epochs ? total_solve_ms / static_cast<double>(epochs) : 0.0;
}

double EstimateSummary::wall_ms_per_epoch() const {
  return epochs ? total_wall_ms / static_cast<double>(epochs) : 0.0;
}

std::string EstimateSummary::describe() const {
  auto pct = [](std::size_t n, std::size_t d) {
    return d ? 100.0 * static_cast<double>(n) / static_cast<double>(d) : 0.0;
  };
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "epochs %zu, solved %zu (%.1f%%), converged %.1f%%, CLAS fix %.1f%% float %.1f%%, "
                "baselines fixed %.1f%%, mean iterations %.2f, solve %.3f ms/epoch, "
                "wall %.3f ms/epoch",
                epochs, solved, pct(solved, epochs), pct(converged, solved),
                pct(clas_fix, clas_total), pct(clas_float, clas_total),
                pct(baselines_fixed, baselines_total), mean_iterations(), mean_solve_ms(),
                wall_ms_per_epoch());
  return buf;
}

EstimateSummary estimate(std::istream& measurements, std::ostream& estimates,
                         const RunConfig& cfg) {
  cfg.validate();
  io::MeasurementReader reader(measurements, configured_origin(cfg));
  EpochEstimator estimator(cfg);
  EstimateSummary summary;
  const auto start = Clock::now();
  while (auto problem = reader.next()) {
    for (const auto& fix : problem->clas) {
      ++summary.clas_total;
      summary.clas_fix += fix.status == graph::FixStatus::kFix ? 1 : 0;
      summary.clas_float += fix.status == graph::FixStatus::kFloat ? 1 : 0;
    }
    for (const auto& obs : problem->baselines) {
      ++summary.baselines_total;
      summary.baselines_fixed += obs.fixed ? 1 : 0;
    }
    const auto record = estimator.process(std::move(*problem));
    ++summary.epochs;
    summary.total_solve_ms += estimator.last_solve_ms();
    if (record.state) {
      ++summary.solved;
      summary.converged += record.converged.value_or(false) ? 1 : 0;
      summary.total_iterations += record.iterations.value_or(0);
    }
    estimates << io::format_state_record(record) << '\n';
  }
  summary.total_wall_ms = elapsed_ms(start);
  if (!estimates) throw DataError("failed writing estimates");
  return summary;
}

EstimateSummary estimate_file(const std::string& measurements_path,
                              const std::string& estimates_path, const RunConfig& cfg) {
  std::ifstream in(measurements_path);
  if (!in) throw DataError("cannot open " + measurements_path);
  const auto parent = std::filesystem::path(estimates_path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  auto out = open_output(estimates_path);
  return estimate(in, out, cfg);
}

std::vector<vehicle::VehicleState> solved_states(const std::vector<io::StateRecord>& records) {
  std::vector<vehicle::VehicleState> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.state) out.push_back(*r.state);
  }
  return out;
}

EvaluateOutput evaluate(const std::vector<LabeledFile>& estimates,
                        const std::optional<std::string>& reference, EvaluationKind kind) {
  EvaluateOutput out;
  std::ostringstream csv;
  if (kind == EvaluationKind::kStatic) {
    eval::StaticReport report;
    eval::write_static_csv_header(csv);
    for (const auto& file : estimates) {
      const auto states = solved_states(io::read_state_file(file.path));
      eval::MethodRow<eval::StaticRow> row{file.label, std::nullopt};
      if (states.size() >= 2) row.row = eval::static_statistics(states);
      eval::write_static_csv(csv, file.label, states);
      report.methods.push_back(std::move(row));
    }
    out.json = eval::emit_report(report, eval::ReportFormat::kJson);
    out.text = eval::emit_report(report, eval::ReportFormat::kText);
  } else {
    if (!reference) throw EvaluationError("kinematic evaluation requires a reference file");
    const auto ref = solved_states(io::read_state_file(*reference));
    if (ref.size() < 2) throw EvaluationError("reference has fewer than 2 usable epochs");
    eval::KinematicReport report;
    eval::write_kinematic_csv_header(csv);
    for (const auto& file : estimates) {
      const auto states = solved_states(io::read_state_file(file.path));
      eval::MethodRow<eval::KinematicRow> row{file.label, std::nullopt};
      if (!states.empty()) row.row = eval::kinematic_rms(states, ref);
      eval::write_kinematic_csv(csv, file.label, states, ref);
      report.methods.push_back(std::move(row));
    }
    out.json = eval::emit_report(report, eval::ReportFormat::kJson);
    out.text = eval::emit_report(report, eval::ReportFormat::kText);
  }
  out.csv = csv.str();
  out.complete = out.json.complete;
  return out;
}

ScenarioPaths run_scenario(const RunConfig& cfg, const std::string& out_dir) {
  const auto sim = simulate(cfg, out_dir);
  ScenarioPaths paths;
  paths.truth = sim.truth_path;
  paths.measurements = sim.measurements_path;
  paths.estimates = join(out_dir, "estimates_" + std::string(to_string(cfg.mode)) + ".jsonl");
  (void)estimate_file(paths.measurements, paths.estimates, cfg);
  return paths;
}

}  // namespace artnav::pipeline

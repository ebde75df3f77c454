#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "artnav/vehicle_model.hpp"

namespace artnav::eval {

/// Population standard deviations of one method's static run.
struct StaticRow {
  double orientation_std_deg = 0.0;
  double articulation_std_deg = 0.0;
  Vec3 position_std_cm = Vec3::Zero();  // east, north, up
  std::size_t samples = 0;
};

/// RMS errors of one method against the reference.
struct KinematicRow {
  double orientation_rms_deg = 0.0;
  double articulation_rms_deg = 0.0;
  Vec3 position_rms_cm = Vec3::Zero();
  double coverage = 0.0;  // matched reference epochs / reference epochs
  std::size_t matched = 0;
};

template <typename Row>
struct MethodRow {
  std::string method;
  std::optional<Row> row;  // empty: no data for this method
};

struct StaticReport {
  std::vector<MethodRow<StaticRow>> methods;
};

struct KinematicReport {
  std::vector<MethodRow<KinematicRow>> methods;
};

/// Angles are taken about their circular mean, so a cluster straddling the
/// +-180 deg seam has the spread of its wrapped differences.
/// Throws EvaluationError with fewer than two states.
[[nodiscard]] StaticRow static_statistics(std::span<const vehicle::VehicleState> states);

/// Nearest-neighbour pairs (estimate index, reference index) whose timestamps
/// differ by at most `tolerance`.
struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double coverage = 0.0;
};

[[nodiscard]] Alignment align(std::span<const vehicle::VehicleState> estimates,
                              std::span<const vehicle::VehicleState> reference,
                              double tolerance);

/// Median spacing of the reference timestamps.
[[nodiscard]] double median_period(std::span<const vehicle::VehicleState> reference);

/// Aligns within half the reference epoch period. Throws EvaluationError when
/// fewer than two epochs match or coverage is below 50%.
[[nodiscard]] KinematicRow kinematic_rms(std::span<const vehicle::VehicleState> estimates,
                                         std::span<const vehicle::VehicleState> reference);

enum class ReportFormat { kJson, kText };

struct Document {
  std::string content;
  bool complete = true;  // false when any method has no data
};

[[nodiscard]] Document emit_report(const StaticReport& report, ReportFormat format);
[[nodiscard]] Document emit_report(const KinematicReport& report, ReportFormat format);

/// Per-epoch CSV rows behind the reports. Headers are written by the
/// *_csv_header functions.
void write_static_csv_header(std::ostream& os);
void write_static_csv(std::ostream& os, const std::string& method,
                      std::span<const vehicle::VehicleState> states);
void write_kinematic_csv_header(std::ostream& os);
void write_kinematic_csv(std::ostream& os, const std::string& method,
                         std::span<const vehicle::VehicleState> estimates,
                         std::span<const vehicle::VehicleState> reference);

}  // namespace artnav::eval

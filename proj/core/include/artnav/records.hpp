#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>

#include "artnav/factor_graph.hpp"
#include "artnav/geodesy.hpp"
#include "artnav/vehicle_model.hpp"

namespace artnav::io {

/// Seconds rounded to the millisecond resolution of the file formats.
[[nodiscard]] double round_timestamp(double t);

/// One measurement epoch as a single JSON line (no trailing newline):
///
///   {"timestamp":0.05,
///    "clas":[{"ant":1,"status":"fix","e":..,"n":..,"u":..,"cov":[6]}],
///    "baselines":[{"from":2,"to":1,"fixed":true,"de":..,"dn":..,"du":..,"cov":[6]}]}
///
/// `cov` holds the upper triangle row by row: xx xy xz yy yz zz (m^2).
/// With `geodetic_origin` set, CLAS positions are written as
/// "lat_deg","lon_deg","h" instead of "e","n","u".
[[nodiscard]] std::string format_measurement_record(
    const graph::EpochProblem& problem,
    const std::optional<geodesy::EnuOrigin>& geodetic_origin = std::nullopt);

/// Streaming reader for measurement JSONL. Enforces strictly increasing
/// timestamps. Geodetic CLAS entries are converted with the configured origin,
/// or, without one, with an origin anchored at the first admitted fix of
/// antenna 1 (falling back to the lowest-numbered admitted fix of that epoch).
class MeasurementReader {
 public:
  explicit MeasurementReader(std::istream& in,
                             std::optional<geodesy::EnuOrigin> origin = std::nullopt);

  /// Next epoch, or nullopt at end of stream. Throws DataError with the line
  /// number on malformed input. Blank lines are skipped.
  [[nodiscard]] std::optional<graph::EpochProblem> next();

  [[nodiscard]] std::size_t line_number() const { return line_; }
  [[nodiscard]] const std::optional<geodesy::EnuOrigin>& origin() const { return origin_; }

 private:
  std::istream& in_;
  std::optional<geodesy::EnuOrigin> origin_;
  std::size_t line_ = 0;
  std::optional<double> last_timestamp_;
};

/// Parses one measurement line. Geodetic entries require `origin`.
[[nodiscard]] graph::EpochProblem parse_measurement_record(
    std::string_view line, const std::optional<geodesy::EnuOrigin>& origin = std::nullopt);

/// Per-epoch vehicle state as written to truth and estimate files.
struct StateRecord {
  double timestamp = 0.0;
  std::optional<vehicle::VehicleState> state;  // empty for failed epochs
  std::optional<AntennaStateVector> antennas;
  std::optional<int> iterations;
  std::optional<bool> converged;
  std::string error;  // set for failed epochs
};

/// {"timestamp":..,"status":"ok","orientation_deg":..,"articulation_deg":..,
///  "e":..,"n":..,"u":..,"quality":"all_fixed","flags":[..],
///  "iterations":..,"converged":..,"antennas":[[e,n,u] x4]}
/// or {"timestamp":..,"status":"failed","error":".."}.
[[nodiscard]] std::string format_state_record(const StateRecord& record);
[[nodiscard]] StateRecord parse_state_record(std::string_view line);

/// Reads a whole truth/estimate file. Throws DataError with line numbers.
[[nodiscard]] std::vector<StateRecord> read_state_file(const std::string& path);

}  // namespace artnav::io

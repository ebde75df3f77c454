#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "artnav/factor_graph.hpp"
#include "artnav/geodesy.hpp"
#include "artnav/simulator.hpp"
#include "artnav/vehicle_model.hpp"

namespace artnav::pipeline {

inline constexpr int kSchemaVersion = 1;

/// proposed: all three factor types. clas_only: moving-base baselines are
/// dropped, length priors and the four-antenna control-point average stay.
enum class Mode { kProposed, kClasOnly };

[[nodiscard]] std::string_view to_string(Mode mode);
/// Throws ConfigError.
[[nodiscard]] Mode parse_mode(std::string_view text);

enum class MeasurementFrame { kEnu, kGeodetic };

struct RunConfig {
  int schema_version = kSchemaVersion;
  vehicle::VehicleConfig vehicle;
  sim::TrajectorySpec trajectory;
  sim::NoiseModel noise;
  graph::SolverSettings solver;
  double prior_variance = 1e-4;  // m^2, on both length priors
  Mode mode = Mode::kProposed;
  std::string out_dir = ".";
  /// ENU anchor. Without it, geodetic inputs anchor on the session's first
  /// admitted fix of antenna 1.
  std::optional<geodesy::GeodeticPosition> origin;
  MeasurementFrame measurement_frame = MeasurementFrame::kEnu;

  [[nodiscard]] std::uint64_t seed() const { return noise.rng_seed; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a JSON config document; absent fields keep their defaults and
/// unknown fields are rejected. Throws ConfigError.
[[nodiscard]] RunConfig parse_config(std::string_view text);
[[nodiscard]] RunConfig load_config(const std::string& path);

}  // namespace artnav::pipeline

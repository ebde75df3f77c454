#pragma once

#include <array>
#include <string_view>

#include "artnav/factor_graph.hpp"
#include "artnav/types.hpp"

namespace artnav::vehicle {

/// Rigid geometry of the articulated vehicle.
///
/// Each section has a body frame with x pointing along its antenna baseline
/// (antenna 1 -> 2 on the front section, 3 -> 4 on the rear), y to the left
/// and z up. `offsets[i]` is the vector from antenna i+1 to the control point
/// in the body frame of the section that carries the antenna.
struct VehicleConfig {
  double length_front = 2.8;  // L12
  double length_rear = 4.5;   // L34
  std::array<Vec3, kAntennaCount> offsets{
      Vec3(-1.0, 0.0, -3.0), Vec3(-3.8, 0.0, -3.0),
      Vec3(5.2, 0.0, -2.6), Vec3(0.7, 0.0, -2.6)};
  double epoch_rate = 20.0;  // Hz
  double max_articulation = deg2rad(45.0);
  /// Distance from the hitch forward to the front axle and back to the rear
  /// axle; used only for the trajectory generator's articulation geometry.
  double front_axle_distance = 1.6;
  double rear_axle_distance = 2.4;

  /// Throws ConfigError naming the field.
  void validate() const;
  /// Throws ConfigError unless offsets place both antennas of each section on
  /// its body x axis with the configured spacing (1e-6 m).
  void validate_section_geometry() const;
};

enum class Quality { kAllFixed, kPartial, kDegraded };

[[nodiscard]] std::string_view to_string(Quality quality);
[[nodiscard]] Quality parse_quality(std::string_view text);

struct VehicleState {
  double timestamp = 0.0;
  double orientation = 0.0;   // heading of the front section, rad CCW from east
  double articulation = 0.0;  // front heading minus rear heading, rad
  EnuPosition position = Vec3::Zero();  // control point
  Quality quality = Quality::kAllFixed;
  bool articulation_beyond_limit = false;  // |theta| >= pi/2
  bool tilted = false;                     // a section baseline tilts > 5 deg
};

/// Heading of the horizontal projection of (xb - xa), counterclockwise from
/// east, in (-pi, pi]. Throws DegenerateGeometry when the antennas are
/// horizontally coincident.
[[nodiscard]] double section_heading(const EnuPosition& xa, const EnuPosition& xb);

[[nodiscard]] double articulation_angle(const AntennaStateVector& x);

/// Rotation by `heading` about the up axis.
[[nodiscard]] Mat3 heading_rotation(double heading);

/// Mean of the four per-antenna control-point estimates x_i + R(heading_i) B_i.
[[nodiscard]] EnuPosition control_point_position(const AntennaStateVector& x,
                                                 const VehicleConfig& cfg);

[[nodiscard]] VehicleState derive_vehicle_state(double timestamp, const AntennaStateVector& x,
                                                const VehicleConfig& cfg,
                                                const graph::SolveReport& report);

/// Places the four antennas of a vehicle whose control point sits at
/// `control_point` with the given section headings. Inverse of
/// control_point_position for consistent section geometry.
[[nodiscard]] AntennaStateVector place_antennas(const EnuPosition& control_point,
                                                double front_heading, double rear_heading,
                                                const VehicleConfig& cfg);

}  // namespace artnav::vehicle

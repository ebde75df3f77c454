#include "artnav/vehicle_model.hpp"

#include <cmath>
#include <string>

namespace artnav::vehicle {

namespace {

constexpr AntennaId kA1{1};
constexpr AntennaId kA2{2};
constexpr AntennaId kA3{3};
constexpr AntennaId kA4{4};
constexpr double kMaxSectionTilt = deg2rad(5.0);

double tilt(const EnuPosition& xa, const EnuPosition& xb) {
  const Vec3 d = xb - xa;
  return std::atan2(std::abs(d.z()), d.head<2>().norm());
}

}  // namespace

void VehicleConfig::validate() const {
  if (!(length_front > 0.0)) throw ConfigError("vehicle.L12 must be > 0");
  if (!(length_rear > 0.0)) throw ConfigError("vehicle.L34 must be > 0");
  if (!(epoch_rate > 0.0)) throw ConfigError("vehicle.epoch_rate must be > 0");
  if (!(max_articulation > 0.0) || max_articulation > kPi / 2) {
    throw ConfigError("vehicle.max_articulation_deg must be in (0, 90]");
  }
  if (!(front_axle_distance >= 0.0)) throw ConfigError("vehicle.front_axle_distance must be >= 0");
  if (!(rear_axle_distance >= 0.0)) throw ConfigError("vehicle.rear_axle_distance must be >= 0");
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (!offsets[i].allFinite()) {
      throw ConfigError("vehicle.offsets[" + std::to_string(i) + "] must be finite");
    }
  }
}

void VehicleConfig::validate_section_geometry() const {
  // x_{a} = p - R B_a, so x_b - x_a = R (B_a - B_b).
  const Vec3 front = offsets[0] - offsets[1];
  const Vec3 rear = offsets[2] - offsets[3];
  if (std::abs(front.y()) > 1e-6 || !(front.x() > 0.0) ||
      std::abs(front.norm() - length_front) > 1e-6) {
    throw ConfigError(
        "vehicle.offsets: B1 - B2 must point along +x with length L12");
  }
  if (std::abs(rear.y()) > 1e-6 || !(rear.x() > 0.0) ||
      std::abs(rear.norm() - length_rear) > 1e-6) {
    throw ConfigError(
        "vehicle.offsets: B3 - B4 must point along +x with length L34");
  }
}

std::string_view to_string(Quality quality) {
  switch (quality) {
    case Quality::kAllFixed: return "all_fixed";
    case Quality::kPartial: return "partial";
    case Quality::kDegraded: return "degraded";
  }
  return "degraded";
}

Quality parse_quality(std::string_view text) {
  if (text == "all_fixed") return Quality::kAllFixed;
  if (text == "partial") return Quality::kPartial;
  if (text == "degraded") return Quality::kDegraded;
  throw DataError("unknown quality '" + std::string(text) + "'");
}

double section_heading(const EnuPosition& xa, const EnuPosition& xb) {
  const double de = xb.x() - xa.x();
  const double dn = xb.y() - xa.y();
  if (std::hypot(de, dn) <= 1e-6) {
    throw DegenerateGeometry("antennas are horizontally coincident; heading undefined");
  }
  return wrap_angle(std::atan2(dn, de));
}

double articulation_angle(const AntennaStateVector& x) {
  return wrap_angle(section_heading(x[kA1], x[kA2]) - section_heading(x[kA3], x[kA4]));
}

Mat3 heading_rotation(double heading) {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  Mat3 r;
  r << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

EnuPosition control_point_position(const AntennaStateVector& x, const VehicleConfig& cfg) {
  const Mat3 front = heading_rotation(section_heading(x[kA1], x[kA2]));
  const Mat3 rear = heading_rotation(section_heading(x[kA3], x[kA4]));
  const Vec3 sum = (x[kA1] + front * cfg.offsets[0]) + (x[kA2] + front * cfg.offsets[1]) +
                   (x[kA3] + rear * cfg.offsets[2]) + (x[kA4] + rear * cfg.offsets[3]);
  return sum / 4.0;
}

VehicleState derive_vehicle_state(double timestamp, const AntennaStateVector& x,
                                  const VehicleConfig& cfg, const graph::SolveReport& report) {
  VehicleState out;
  out.timestamp = timestamp;
  out.orientation = section_heading(x[kA1], x[kA2]);
  out.articulation = articulation_angle(x);
  out.position = control_point_position(x, cfg);
  out.articulation_beyond_limit = std::abs(out.articulation) >= kPi / 2;
  out.tilted = tilt(x[kA1], x[kA2]) > kMaxSectionTilt || tilt(x[kA3], x[kA4]) > kMaxSectionTilt;

  if (!report.converged || report.degenerate_length_dropped) {
    out.quality = Quality::kDegraded;
  } else if (report.clas_fix_count == kAntennaCount && report.clas_float_count == 0 &&
             report.fixed_baseline_count == 6) {
    out.quality = Quality::kAllFixed;
  } else {
    out.quality = Quality::kPartial;
  }
  return out;
}

AntennaStateVector place_antennas(const EnuPosition& control_point, double front_heading,
                                  double rear_heading, const VehicleConfig& cfg) {
  const Mat3 front = heading_rotation(front_heading);
  const Mat3 rear = heading_rotation(rear_heading);
  AntennaStateVector x;
  x[kA1] = control_point - front * cfg.offsets[0];
  x[kA2] = control_point - front * cfg.offsets[1];
  x[kA3] = control_point - rear * cfg.offsets[2];
  x[kA4] = control_point - rear * cfg.offsets[3];
  return x;
}

}  // namespace artnav::vehicle

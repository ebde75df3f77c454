#pragma once

#include "artnav/types.hpp"

namespace artnav::geodesy {

// WGS84 ellipsoid.
inline constexpr double kSemiMajorAxis = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kSemiMinorAxis = kSemiMajorAxis * (1.0 - kFlattening);
inline constexpr double kEccentricitySq = kFlattening * (2.0 - kFlattening);

/// Latitude/longitude in radians, height in meters above the ellipsoid.
struct GeodeticPosition {
  double latitude = 0.0;
  double longitude = 0.0;
  double height = 0.0;
};

/// Throws DataError when latitude is outside [-pi/2, pi/2], longitude outside
/// (-pi, pi] or any field is not finite.
void validate(const GeodeticPosition& p);

[[nodiscard]] Vec3 geodetic_to_ecef(const GeodeticPosition& p);

/// Iterative inverse of geodetic_to_ecef; sub-micrometer for terrestrial points.
[[nodiscard]] GeodeticPosition ecef_to_geodetic(const Vec3& ecef);

/// Anchor of a local east-north-up frame.
class EnuOrigin {
 public:
  explicit EnuOrigin(const GeodeticPosition& anchor);

  [[nodiscard]] const GeodeticPosition& anchor() const { return anchor_; }
  [[nodiscard]] const Vec3& anchor_ecef() const { return anchor_ecef_; }
  /// Rows are the east, north and up unit vectors expressed in ECEF.
  [[nodiscard]] const Mat3& ecef_to_enu_rotation() const { return rotation_; }

 private:
  GeodeticPosition anchor_;
  Vec3 anchor_ecef_;
  Mat3 rotation_;
};

[[nodiscard]] EnuPosition ecef_to_enu(const Vec3& ecef, const EnuOrigin& origin);
[[nodiscard]] Vec3 enu_to_ecef(const EnuPosition& enu, const EnuOrigin& origin);

[[nodiscard]] inline EnuPosition geodetic_to_enu(const GeodeticPosition& p,
                                                 const EnuOrigin& origin) {
  return ecef_to_enu(geodetic_to_ecef(p), origin);
}
[[nodiscard]] inline GeodeticPosition enu_to_geodetic(const EnuPosition& p,
                                                      const EnuOrigin& origin) {
  return ecef_to_geodetic(enu_to_ecef(p, origin));
}

}  // namespace artnav::geodesy

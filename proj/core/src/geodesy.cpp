#include "artnav/geodesy.hpp"

#include <cmath>
#include <string>

namespace artnav::geodesy {

void validate(const GeodeticPosition& p) {
  if (!std::isfinite(p.latitude) || !std::isfinite(p.longitude) || !std::isfinite(p.height)) {
    throw DataError("geodetic position has non-finite component");
  }
  if (p.latitude < -kPi / 2 || p.latitude > kPi / 2) {
    throw DataError("latitude out of range: " + std::to_string(p.latitude));
  }
  if (p.longitude <= -kPi || p.longitude > kPi) {
    throw DataError("longitude out of range: " + std::to_string(p.longitude));
  }
}

Vec3 geodetic_to_ecef(const GeodeticPosition& p) {
  const double sin_lat = std::sin(p.latitude);
  const double cos_lat = std::cos(p.latitude);
  const double n = kSemiMajorAxis / std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);
  return {(n + p.height) * cos_lat * std::cos(p.longitude),
          (n + p.height) * cos_lat * std::sin(p.longitude),
          (n * (1.0 - kEccentricitySq) + p.height) * sin_lat};
}

GeodeticPosition ecef_to_geodetic(const Vec3& ecef) {
  const double x = ecef.x();
  const double y = ecef.y();
  const double z = ecef.z();
  const double r_xy = std::hypot(x, y);

  GeodeticPosition out;
  out.longitude = (r_xy > 0.0) ? std::atan2(y, x) : 0.0;
  if (out.longitude <= -kPi) out.longitude += 2.0 * kPi;

  if (r_xy < 1e-9) {
    out.latitude = z >= 0.0 ? kPi / 2 : -kPi / 2;
    out.height = std::abs(z) - kSemiMinorAxis;
    return out;
  }

  // Fixed-point iteration on latitude; converges to machine precision in a
  // handful of steps away from the poles.
  double lat = std::atan2(z, r_xy * (1.0 - kEccentricitySq));
  for (int i = 0; i < 10; ++i) {
    const double sin_lat = std::sin(lat);
    const double n = kSemiMajorAxis / std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);
    const double next = std::atan2(z + kEccentricitySq * n * sin_lat, r_xy);
    const bool done = std::abs(next - lat) < 1e-15;
    lat = next;
    if (done) break;
  }
  const double sin_lat = std::sin(lat);
  const double cos_lat = std::cos(lat);
  const double n = kSemiMajorAxis / std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);
  out.latitude = lat;
  // Height from whichever projection is better conditioned at this latitude.
  if (std::abs(cos_lat) > 0.1) {
    out.height = r_xy / cos_lat - n;
  } else {
    out.height = z / sin_lat - n * (1.0 - kEccentricitySq);
  }
  return out;
}

EnuOrigin::EnuOrigin(const GeodeticPosition& anchor)
    : anchor_(anchor), anchor_ecef_(geodetic_to_ecef(anchor)) {
  validate(anchor);
  const double sl = std::sin(anchor.latitude);
  const double cl = std::cos(anchor.latitude);
  const double so = std::sin(anchor.longitude);
  const double co = std::cos(anchor.longitude);
  rotation_ << -so, co, 0.0,
               -sl * co, -sl * so, cl,
               cl * co, cl * so, sl;
}

EnuPosition ecef_to_enu(const Vec3& ecef, const EnuOrigin& origin) {
  return origin.ecef_to_enu_rotation() * (ecef - origin.anchor_ecef());
}

Vec3 enu_to_ecef(const EnuPosition& enu, const EnuOrigin& origin) {
  return origin.ecef_to_enu_rotation().transpose() * enu + origin.anchor_ecef();
}

}  // namespace artnav::geodesy

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "artnav/error.hpp"

namespace artnav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Position in the local east-north-up frame, meters. x = east, y = north, z = up.
using EnuPosition = Vec3;

inline constexpr int kAntennaCount = 4;
inline constexpr int kStateDim = 3 * kAntennaCount;

/// Antenna number 1..4. Antennas 1 and 2 sit on the front section, 3 and 4 on
/// the rear section.
class AntennaId {
 public:
  constexpr explicit AntennaId(int number) : number_(number) {
    if (number < 1 || number > kAntennaCount) {
      throw DataError("antenna id must be in 1..4, got " + std::to_string(number));
    }
  }

  static constexpr AntennaId from_index(std::size_t index) {
    return AntennaId(static_cast<int>(index) + 1);
  }

  [[nodiscard]] constexpr int number() const { return number_; }
  [[nodiscard]] constexpr std::size_t index() const {
    return static_cast<std::size_t>(number_ - 1);
  }

  constexpr auto operator<=>(const AntennaId&) const = default;

 private:
  int number_;
};

/// The optimization unknowns: the four antenna positions of one epoch.
struct AntennaStateVector {
  std::array<EnuPosition, kAntennaCount> positions{
      Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};

  [[nodiscard]] EnuPosition& operator[](AntennaId id) { return positions[id.index()]; }
  [[nodiscard]] const EnuPosition& operator[](AntennaId id) const {
    return positions[id.index()];
  }

  [[nodiscard]] Eigen::Matrix<double, kStateDim, 1> stacked() const {
    Eigen::Matrix<double, kStateDim, 1> out;
    for (int i = 0; i < kAntennaCount; ++i) out.segment<3>(3 * i) = positions[i];
    return out;
  }

  static AntennaStateVector from_stacked(const Eigen::Matrix<double, kStateDim, 1>& v) {
    AntennaStateVector out;
    for (int i = 0; i < kAntennaCount; ++i) out.positions[i] = v.segment<3>(3 * i);
    return out;
  }

  [[nodiscard]] bool all_finite() const {
    for (const auto& p : positions) {
      if (!p.allFinite()) return false;
    }
    return true;
  }
};

inline constexpr double kPi = std::numbers::pi;

[[nodiscard]] constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
[[nodiscard]] constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
[[nodiscard]] inline double wrap_angle(double rad) {
  double w = std::remainder(rad, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

}  // namespace artnav

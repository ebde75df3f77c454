#pragma once

#include <vector>

#include <Eigen/Core>

namespace artnav::sim {

/// Planar pose of a point moving along a path.
struct PathSample {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double heading = 0.0;    // rad, CCW from east
  double curvature = 0.0;  // 1/m, positive for left turns
};

/// Arc-length parametrized chain of straight segments and circular arcs with
/// tangent continuity.
class Path {
 public:
  Path(Eigen::Vector2d start, double heading) : start_(start), start_heading_(heading) {}

  void add_line(double length);
  /// Positive `sweep` turns left (counterclockwise).
  void add_arc(double radius, double sweep);

  [[nodiscard]] double length() const { return length_; }
  /// `s` is clamped to [0, length()].
  [[nodiscard]] PathSample sample(double s) const;
  [[nodiscard]] PathSample end() const { return sample(length_); }

  /// Two tangent circles of equal radius: a left loop, then a right loop,
  /// returning to the start pose.
  static Path figure_eight(Eigen::Vector2d start, double heading, double loop_radius);

  /// Polyline through the waypoints with corners rounded by `turn_radius`.
  /// Throws ConfigError if a fillet does not fit its segments.
  static Path through_waypoints(const std::vector<Eigen::Vector2d>& waypoints,
                                double turn_radius);

 private:
  struct Piece {
    Eigen::Vector2d start;
    double heading;
    double length;
    double curvature;
  };

  Eigen::Vector2d start_;
  double start_heading_;
  double length_ = 0.0;
  std::vector<Piece> pieces_;

  [[nodiscard]] PathSample tail() const;
  static PathSample advance(const Piece& piece, double s);
};

}  // namespace artnav::sim

#include "artnav/path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "artnav/types.hpp"

namespace artnav::sim {

PathSample Path::advance(const Piece& piece, double s) {
  PathSample out;
  out.curvature = piece.curvature;
  const double c = std::cos(piece.heading);
  const double n = std::sin(piece.heading);
  if (piece.curvature == 0.0) {
    out.position = piece.start + s * Eigen::Vector2d(c, n);
    out.heading = piece.heading;
    return out;
  }
  const double r = 1.0 / piece.curvature;  // signed
  const double turned = s * piece.curvature;
  // Center lies to the left for positive curvature.
  const Eigen::Vector2d center = piece.start + r * Eigen::Vector2d(-n, c);
  const double h = piece.heading + turned;
  out.position = center + r * Eigen::Vector2d(std::sin(h), -std::cos(h));
  out.heading = wrap_angle(h);
  return out;
}

PathSample Path::tail() const {
  if (pieces_.empty()) return {start_, wrap_angle(start_heading_), 0.0};
  return advance(pieces_.back(), pieces_.back().length);
}

void Path::add_line(double length) {
  if (!(length > 0.0)) return;
  const auto t = tail();
  pieces_.push_back({t.position, t.heading, length, 0.0});
  length_ += length;
}

void Path::add_arc(double radius, double sweep) {
  if (!(radius > 0.0)) throw ConfigError("trajectory arc radius must be > 0");
  if (sweep == 0.0) return;
  const auto t = tail();
  const double curvature = (sweep > 0.0 ? 1.0 : -1.0) / radius;
  const double length = std::abs(sweep) * radius;
  pieces_.push_back({t.position, t.heading, length, curvature});
  length_ += length;
}

PathSample Path::sample(double s) const {
  if (pieces_.empty()) return tail();
  s = std::clamp(s, 0.0, length_);
  for (const auto& piece : pieces_) {
    if (s <= piece.length) return advance(piece, s);
    s -= piece.length;
  }
  return tail();
}

Path Path::figure_eight(Eigen::Vector2d start, double heading, double loop_radius) {
  if (!(loop_radius > 0.0)) throw ConfigError("trajectory.loop_radius must be > 0");
  Path p(start, heading);
  p.add_arc(loop_radius, 2.0 * kPi);
  p.add_arc(loop_radius, -2.0 * kPi);
  return p;
}

Path Path::through_waypoints(const std::vector<Eigen::Vector2d>& waypoints,
                             double turn_radius) {
  if (waypoints.size() < 2) throw ConfigError("trajectory.waypoints needs at least 2 points");
  std::vector<double> headings;
  std::vector<double> lengths;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const Eigen::Vector2d d = waypoints[i + 1] - waypoints[i];
    if (d.norm() < 1e-9) {
      throw ConfigError("trajectory.waypoints[" + std::to_string(i + 1) + "] repeats the previous point");
    }
    headings.push_back(std::atan2(d.y(), d.x()));
    lengths.push_back(d.norm());
  }
  // Tangent length consumed by the fillet at each interior vertex.
  std::vector<double> turn(headings.size(), 0.0);
  std::vector<double> cut(headings.size() + 1, 0.0);
  for (std::size_t i = 1; i < headings.size(); ++i) {
    turn[i] = wrap_angle(headings[i] - headings[i - 1]);
    if (std::abs(turn[i]) > kPi - 1e-6) {
      throw ConfigError("trajectory.waypoints[" + std::to_string(i) + "] reverses direction");
    }
    cut[i] = turn_radius * std::tan(std::abs(turn[i]) / 2.0);
  }
  Path p(waypoints.front(), headings.front());
  for (std::size_t i = 0; i < headings.size(); ++i) {
    const double straight = lengths[i] - cut[i] - cut[i + 1];
    if (straight < -1e-9) {
      throw ConfigError("trajectory.turn_radius too large for segment " + std::to_string(i));
    }
    if (i > 0 && turn[i] != 0.0) p.add_arc(turn_radius, turn[i]);
    p.add_line(straight);
  }
  return p;
}

}  // namespace artnav::sim

#include "artnav/simulator.hpp"

#include <cmath>
#include <string>

#include "artnav/path.hpp"

namespace artnav::sim {

namespace {

Mat3 diagonal_covariance(const Vec3& sigma, double floor) {
  const Vec3 s = sigma.cwiseMax(floor);
  return s.cwiseProduct(s).asDiagonal();
}

void check_probability(double p, const std::string& field) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(field + " must be in [0, 1]");
}

void check_sigma(const Vec3& s, const std::string& field) {
  if (!s.allFinite() || (s.array() < 0.0).any()) throw ConfigError(field + " must be >= 0");
}

}  // namespace

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::kStaticPose: return "static_pose";
    case TrajectoryKind::kFigureEight: return "figure_eight";
    case TrajectoryKind::kWaypointPath: return "waypoint_path";
  }
  return "static_pose";
}

TrajectoryKind parse_trajectory_kind(std::string_view text) {
  if (text == "static_pose") return TrajectoryKind::kStaticPose;
  if (text == "figure_eight") return TrajectoryKind::kFigureEight;
  if (text == "waypoint_path") return TrajectoryKind::kWaypointPath;
  throw ConfigError("trajectory.kind: unknown value '" + std::string(text) + "'");
}

void TrajectorySpec::validate() const {
  if (!(duration > 0.0)) throw ConfigError("trajectory.duration must be > 0");
  if (!(speed >= 0.0)) throw ConfigError("trajectory.speed must be >= 0");
  if (!(epoch_rate > 0.0)) throw ConfigError("trajectory.epoch_rate must be > 0");
  if (!start.allFinite()) throw ConfigError("trajectory.start must be finite");
  if (kind == TrajectoryKind::kStaticPose && speed != 0.0) {
    throw ConfigError("trajectory.speed must be 0 for static_pose");
  }
  if (kind == TrajectoryKind::kFigureEight && !(loop_radius > 0.0)) {
    throw ConfigError("trajectory.loop_radius must be > 0");
  }
  if (kind == TrajectoryKind::kWaypointPath) {
    if (waypoints.size() < 2) throw ConfigError("trajectory.waypoints needs at least 2 points");
    if (!(turn_radius > 0.0)) throw ConfigError("trajectory.turn_radius must be > 0");
  }
}

double steady_turn_articulation(double curvature, const vehicle::VehicleConfig& cfg) {
  const double kf = curvature * cfg.front_axle_distance;
  const double kr = curvature * cfg.rear_axle_distance;
  if (std::abs(kf) > 1.0 || std::abs(kr) > 1.0) {
    throw ConfigError("trajectory: curvature " + std::to_string(curvature) +
                      " 1/m is tighter than the axle geometry allows");
  }
  return std::asin(kf) + std::asin(kr);
}

std::vector<TruthEpoch> generate_trajectory(const TrajectorySpec& spec,
                                            const vehicle::VehicleConfig& cfg) {
  spec.validate();
  cfg.validate();
  cfg.validate_section_geometry();

  const Eigen::Vector2d start2 = spec.start.head<2>();
  Path path(start2, spec.heading);
  bool closed = false;
  switch (spec.kind) {
    case TrajectoryKind::kStaticPose:
      break;
    case TrajectoryKind::kFigureEight:
      path = Path::figure_eight(start2, spec.heading, spec.loop_radius);
      closed = true;
      break;
    case TrajectoryKind::kWaypointPath:
      path = Path::through_waypoints(spec.waypoints, spec.turn_radius);
      break;
  }

  const auto count = static_cast<std::size_t>(std::llround(spec.duration * spec.epoch_rate));
  std::vector<TruthEpoch> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double elapsed = static_cast<double>(k) / spec.epoch_rate;
    TruthEpoch epoch;
    epoch.timestamp = spec.start_time + elapsed;

    double front = 0.0;
    double rear = 0.0;
    EnuPosition point = spec.start;
    if (spec.kind == TrajectoryKind::kStaticPose) {
      front = spec.heading;
      rear = spec.heading - spec.articulation;
      if (std::abs(spec.articulation) >= cfg.max_articulation) {
        throw ConfigError("trajectory.articulation_deg exceeds vehicle.max_articulation_deg");
      }
    } else {
      double s = spec.speed * elapsed;
      if (closed && path.length() > 0.0) s = std::fmod(s, path.length());
      const auto pose = path.sample(s);
      const double theta = steady_turn_articulation(pose.curvature, cfg);
      if (std::abs(theta) >= cfg.max_articulation) {
        throw ConfigError("trajectory: curvature demands articulation of " +
                          std::to_string(rad2deg(theta)) +
                          " deg, beyond vehicle.max_articulation_deg");
      }
      front = pose.heading + std::asin(pose.curvature * cfg.front_axle_distance);
      rear = front - theta;
      point.head<2>() = pose.position;
    }
    front = wrap_angle(front);
    rear = wrap_angle(rear);

    epoch.antennas = vehicle::place_antennas(point, front, rear, cfg);
    epoch.state.timestamp = epoch.timestamp;
    epoch.state.orientation = front;
    epoch.state.articulation = wrap_angle(front - rear);
    epoch.state.position = point;
    epoch.state.quality = vehicle::Quality::kAllFixed;
    out.push_back(epoch);
  }
  return out;
}

void NoiseModel::validate() const {
  check_sigma(clas_sigma_fix, "noise.clas_sigma_fix");
  check_sigma(clas_sigma_float, "noise.clas_sigma_float");
  check_sigma(mvrtk_sigma, "noise.mvrtk_sigma");
  if (clas_bias.enabled) {
    check_sigma(clas_bias.sigma, "noise.clas_bias.sigma");
    if (!(clas_bias.time_constant > 0.0)) {
      throw ConfigError("noise.clas_bias.time_constant must be > 0");
    }
  }
  for (int i = 0; i < kAntennaCount; ++i) {
    const std::string idx = "[" + std::to_string(i) + "]";
    check_probability(clas_fix_prob[i], "noise.clas_fix_prob" + idx);
    check_probability(clas_float_prob[i], "noise.clas_float_prob" + idx);
    if (clas_fix_prob[i] + clas_float_prob[i] > 1.0 + 1e-12) {
      throw ConfigError("noise.clas_fix_prob" + idx + " + noise.clas_float_prob" + idx +
                        " must be <= 1");
    }
  }
  check_probability(mvrtk_fix_prob, "noise.mvrtk_fix_prob");
  check_probability(outlier_prob, "noise.outlier_prob");
  if (!(mvrtk_float_sigma >= 0.0)) throw ConfigError("noise.mvrtk_float_sigma must be >= 0");
  if (!(outlier_magnitude >= 0.0)) throw ConfigError("noise.outlier_magnitude must be >= 0");
  if (!(covariance_floor_sigma > 0.0)) {
    throw ConfigError("noise.covariance_floor_sigma must be > 0");
  }
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Vec3 Rng::normal3(const Vec3& sigma) {
  const double x = normal();
  const double y = normal();
  const double z = normal();
  return {sigma.x() * x, sigma.y() * y, sigma.z() * z};
}

const std::array<std::pair<AntennaId, AntennaId>, 6>& antenna_pairs() {
  static const std::array<std::pair<AntennaId, AntennaId>, 6> pairs = {{
      {AntennaId(2), AntennaId(1)},
      {AntennaId(3), AntennaId(1)},
      {AntennaId(4), AntennaId(1)},
      {AntennaId(3), AntennaId(2)},
      {AntennaId(4), AntennaId(2)},
      {AntennaId(4), AntennaId(3)},
  }};
  return pairs;
}

MeasurementSynthesizer::MeasurementSynthesizer(NoiseModel noise)
    : noise_(std::move(noise)), rng_(noise_.rng_seed) {
  noise_.validate();
}

graph::EpochProblem MeasurementSynthesizer::synthesize(const TruthEpoch& truth) {
  graph::EpochProblem problem;
  problem.timestamp = truth.timestamp;

  // Draw order is part of the stream contract: bias, then per antenna
  // (status, noise, outlier draw, outlier direction), then per antenna
  // relative noise, then per pair (fix draw, float noise).
  if (noise_.clas_bias.enabled) {
    if (!bias_started_) {
      bias_ = rng_.normal3(noise_.clas_bias.sigma);
      bias_started_ = true;
    } else {
      const double dt = std::max(0.0, truth.timestamp - last_time_);
      const double phi = std::exp(-dt / noise_.clas_bias.time_constant);
      bias_ = phi * bias_ + std::sqrt(1.0 - phi * phi) * rng_.normal3(noise_.clas_bias.sigma);
    }
  }
  last_time_ = truth.timestamp;

  for (int i = 0; i < kAntennaCount; ++i) {
    const auto id = AntennaId::from_index(static_cast<std::size_t>(i));
    graph::ClasFix fix;
    fix.antenna = id;
    const double u = rng_.uniform();
    if (u < noise_.clas_fix_prob[i]) {
      fix.status = graph::FixStatus::kFix;
    } else if (u < noise_.clas_fix_prob[i] + noise_.clas_float_prob[i]) {
      fix.status = graph::FixStatus::kFloat;
    } else {
      fix.status = graph::FixStatus::kNone;
    }
    const Vec3& sigma = fix.status == graph::FixStatus::kFix ? noise_.clas_sigma_fix
                                                             : noise_.clas_sigma_float;
    fix.position = truth.antennas[id] + bias_ + rng_.normal3(sigma);
    if (rng_.uniform() < noise_.outlier_prob) {
      Vec3 direction = rng_.normal3(Vec3::Ones());
      if (direction.norm() < 1e-12) direction = Vec3::UnitX();
      fix.position += noise_.outlier_magnitude * direction.normalized();
    }
    fix.covariance = diagonal_covariance(sigma, noise_.covariance_floor_sigma);
    problem.clas.push_back(fix);
  }

  std::array<Vec3, kAntennaCount> relative_error;
  for (auto& e : relative_error) e = rng_.normal3(noise_.mvrtk_sigma);

  const Mat3 fixed_cov =
      diagonal_covariance(std::sqrt(2.0) * noise_.mvrtk_sigma, noise_.covariance_floor_sigma);
  const Vec3 float_sigma =
      (2.0 * noise_.mvrtk_sigma.cwiseProduct(noise_.mvrtk_sigma) +
       Vec3::Constant(noise_.mvrtk_float_sigma * noise_.mvrtk_float_sigma))
          .cwiseSqrt();
  for (const auto& [from, to] : antenna_pairs()) {
    graph::BaselineObservation obs;
    obs.from = from;
    obs.to = to;
    obs.fixed = rng_.uniform() < noise_.mvrtk_fix_prob;
    obs.baseline = (truth.antennas[from] + relative_error[from.index()]) -
                   (truth.antennas[to] + relative_error[to.index()]);
    if (obs.fixed) {
      obs.covariance = fixed_cov;
    } else {
      obs.baseline += rng_.normal3(Vec3::Constant(noise_.mvrtk_float_sigma));
      obs.covariance = diagonal_covariance(float_sigma, noise_.covariance_floor_sigma);
    }
    problem.baselines.push_back(obs);
  }
  return problem;
}

}  // namespace artnav::sim

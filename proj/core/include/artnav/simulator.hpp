#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "artnav/factor_graph.hpp"
#include "artnav/vehicle_model.hpp"

namespace artnav::sim {

enum class TrajectoryKind { kStaticPose, kFigureEight, kWaypointPath };

[[nodiscard]] std::string_view to_string(TrajectoryKind kind);
[[nodiscard]] TrajectoryKind parse_trajectory_kind(std::string_view text);

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::kStaticPose;
  double duration = 300.0;  // s
  double speed = 0.0;       // m/s, along the control-point path
  double start_time = 0.0;
  double epoch_rate = 20.0;  // Hz
  EnuPosition start = Vec3::Zero();  // control point at start_time
  double heading = 0.0;              // rad, initial front heading of the path
  double articulation = 0.0;         // rad, static_pose only
  double loop_radius = 15.0;         // figure_eight lobes
  std::vector<Eigen::Vector2d> waypoints;  // waypoint_path, horizontal ENU
  double turn_radius = 10.0;               // waypoint_path corner fillets

  /// Throws ConfigError naming the field.
  void validate() const;
};

struct TruthEpoch {
  double timestamp = 0.0;
  vehicle::VehicleState state;
  AntennaStateVector antennas;
};

/// Samples a kinematically consistent articulated motion at 1/epoch_rate.
///
/// The control point follows the path. Each section is rotated off the path
/// tangent so that its axle moves along its own heading in a steady turn of
/// the path's curvature: the front section by asin(k * front_axle_distance)
/// into the turn, the rear by asin(k * rear_axle_distance) out of it.
/// Throws ConfigError when the curvature demands |articulation| >=
/// cfg.max_articulation or when the section geometry is inconsistent.
[[nodiscard]] std::vector<TruthEpoch> generate_trajectory(const TrajectorySpec& spec,
                                                          const vehicle::VehicleConfig& cfg);

/// Articulation angle of a steady turn with curvature `curvature` at the
/// control point.
[[nodiscard]] double steady_turn_articulation(double curvature,
                                              const vehicle::VehicleConfig& cfg);

struct BiasModel {
  bool enabled = false;
  Vec3 sigma = Vec3::Constant(0.02);  // stationary std per axis, m
  double time_constant = 60.0;        // s
};

struct NoiseModel {
  Vec3 clas_sigma_fix = Vec3(0.018, 0.023, 0.029);
  Vec3 clas_sigma_float = 5.0 * Vec3(0.018, 0.023, 0.029);
  BiasModel clas_bias;
  std::array<double, kAntennaCount> clas_fix_prob{0.9, 0.9, 0.9, 0.9};
  std::array<double, kAntennaCount> clas_float_prob{0.08, 0.08, 0.08, 0.08};
  /// Per-antenna relative-positioning noise; each baseline inherits the
  /// difference of its two antennas' errors (per-axis std sqrt(2) * sigma).
  Vec3 mvrtk_sigma = Vec3::Constant(0.003);
  double mvrtk_fix_prob = 0.99;
  double mvrtk_float_sigma = 0.3;  // extra noise on unfixed baselines, m
  double outlier_prob = 0.0;       // per antenna and epoch, CLAS wrong fix
  double outlier_magnitude = 1.0;  // m
  /// Reported covariances never go below this std, so noise-free streams
  /// still carry positive-definite covariances.
  double covariance_floor_sigma = 1e-3;
  std::uint64_t rng_seed = 42;

  /// Throws ConfigError naming the field.
  void validate() const;
};

/// Uniform and Gaussian draws on top of mt19937_64 with a fixed, documented
/// transformation, so streams do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// [0, 1) with 53 random bits.
  double uniform();
  /// Box-Muller, one cosine branch per call.
  double normal();
  Vec3 normal3(const Vec3& sigma);

 private:
  std::mt19937_64 engine_;
};

/// Turns truth epochs into the measurement stream the receivers and the RTK
/// engine would deliver. Stateful: owns the RNG and the common-mode CLAS bias.
class MeasurementSynthesizer {
 public:
  explicit MeasurementSynthesizer(NoiseModel noise);

  /// Emits four CLAS entries (status may be none) and six baselines, one per
  /// antenna pair with `from` the higher-numbered antenna. The returned
  /// problem carries no length prior.
  [[nodiscard]] graph::EpochProblem synthesize(const TruthEpoch& truth);

  [[nodiscard]] const NoiseModel& noise() const { return noise_; }
  [[nodiscard]] const Vec3& current_bias() const { return bias_; }

 private:
  NoiseModel noise_;
  Rng rng_;
  Vec3 bias_ = Vec3::Zero();
  bool bias_started_ = false;
  double last_time_ = 0.0;
};

/// The six antenna pairs as (from, to) with from > to.
[[nodiscard]] const std::array<std::pair<AntennaId, AntennaId>, 6>& antenna_pairs();

}  // namespace artnav::sim

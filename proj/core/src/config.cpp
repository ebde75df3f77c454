#include "artnav/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace artnav::pipeline {

namespace {

using json = nlohmann::json;

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + " must be a number");
  return v.get<double>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path + " must be true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + " must be a string");
  return v.get<std::string>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path + " must be an integer");
  return v.get<int>();
}

/// Three numbers, or one number applied to every axis.
Vec3 as_vec3(const json& v, const std::string& path) {
  if (v.is_number()) return Vec3::Constant(v.get<double>());
  if (!v.is_array() || v.size() != 3) throw ConfigError(path + " must be [x, y, z] or a number");
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = as_number(v[static_cast<std::size_t>(i)], path);
  return out;
}

/// One probability for all antennas, or one per antenna.
std::array<double, kAntennaCount> as_per_antenna(const json& v, const std::string& path) {
  std::array<double, kAntennaCount> out{};
  if (v.is_number()) {
    out.fill(v.get<double>());
    return out;
  }
  if (!v.is_array() || v.size() != kAntennaCount) {
    throw ConfigError(path + " must be a number or an array of 4 numbers");
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = as_number(v[i], path);
  return out;
}

// Walks one JSON object, remembering which keys were consumed so unknown keys
// can be reported with their full path.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError((path_.empty() ? "config" : path_) + " must be an object");
  }

  template <typename F>
  void read(const char* key, F&& apply) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it != j_.end()) apply(*it, qualified(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(qualified(key.c_str()) + ": unknown field");
    }
  }

 private:
  [[nodiscard]] std::string qualified(const char* key) const {
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_vehicle(const json& j, vehicle::VehicleConfig& v) {
  Section s(j, "vehicle");
  s.read("L12", [&](const json& x, const std::string& p) { v.length_front = as_number(x, p); });
  s.read("L34", [&](const json& x, const std::string& p) { v.length_rear = as_number(x, p); });
  s.read("offsets", [&](const json& x, const std::string& p) {
    if (!x.is_array() || x.size() != kAntennaCount) {
      throw ConfigError(p + " must hold 4 vectors [x, y, z]");
    }
    for (std::size_t i = 0; i < v.offsets.size(); ++i) {
      v.offsets[i] = as_vec3(x[i], p + "[" + std::to_string(i) + "]");
    }
  });
  s.read("epoch_rate", [&](const json& x, const std::string& p) { v.epoch_rate = as_number(x, p); });
  s.read("max_articulation_deg", [&](const json& x, const std::string& p) {
    v.max_articulation = deg2rad(as_number(x, p));
  });
  s.read("front_axle_distance",
         [&](const json& x, const std::string& p) { v.front_axle_distance = as_number(x, p); });
  s.read("rear_axle_distance",
         [&](const json& x, const std::string& p) { v.rear_axle_distance = as_number(x, p); });
  s.finish();
}

void read_trajectory(const json& j, sim::TrajectorySpec& t, bool& rate_given) {
  Section s(j, "trajectory");
  s.read("kind", [&](const json& x, const std::string& p) {
    try {
      t.kind = sim::parse_trajectory_kind(as_string(x, p));
    } catch (const ConfigError&) {
      throw ConfigError(p + " must be static_pose, figure_eight or waypoint_path");
    }
  });
  s.read("duration", [&](const json& x, const std::string& p) { t.duration = as_number(x, p); });
  s.read("speed", [&](const json& x, const std::string& p) { t.speed = as_number(x, p); });
  s.read("start_time", [&](const json& x, const std::string& p) { t.start_time = as_number(x, p); });
  s.read("epoch_rate", [&](const json& x, const std::string& p) {
    t.epoch_rate = as_number(x, p);
    rate_given = true;
  });
  s.read("start", [&](const json& x, const std::string& p) { t.start = as_vec3(x, p); });
  s.read("heading_deg",
         [&](const json& x, const std::string& p) { t.heading = deg2rad(as_number(x, p)); });
  s.read("articulation_deg",
         [&](const json& x, const std::string& p) { t.articulation = deg2rad(as_number(x, p)); });
  s.read("loop_radius", [&](const json& x, const std::string& p) { t.loop_radius = as_number(x, p); });
  s.read("turn_radius", [&](const json& x, const std::string& p) { t.turn_radius = as_number(x, p); });
  s.read("waypoints", [&](const json& x, const std::string& p) {
    if (!x.is_array()) throw ConfigError(p + " must be an array of [east, north]");
    t.waypoints.clear();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto& w = x[i];
      const std::string wp = p + "[" + std::to_string(i) + "]";
      if (!w.is_array() || w.size() != 2) throw ConfigError(wp + " must be [east, north]");
      t.waypoints.emplace_back(as_number(w[0], wp), as_number(w[1], wp));
    }
  });
  s.finish();
}

void read_noise(const json& j, sim::NoiseModel& n) {
  Section s(j, "noise");
  bool float_given = false;
  s.read("clas_sigma_fix",
         [&](const json& x, const std::string& p) { n.clas_sigma_fix = as_vec3(x, p); });
  s.read("clas_sigma_float", [&](const json& x, const std::string& p) {
    n.clas_sigma_float = as_vec3(x, p);
    float_given = true;
  });
  s.read("clas_bias", [&](const json& x, const std::string&) {
    Section b(x, "noise.clas_bias");
    b.read("enabled", [&](const json& y, const std::string& p) { n.clas_bias.enabled = as_bool(y, p); });
    b.read("sigma", [&](const json& y, const std::string& p) { n.clas_bias.sigma = as_vec3(y, p); });
    b.read("time_constant",
           [&](const json& y, const std::string& p) { n.clas_bias.time_constant = as_number(y, p); });
    b.finish();
  });
  s.read("clas_fix_prob",
         [&](const json& x, const std::string& p) { n.clas_fix_prob = as_per_antenna(x, p); });
  s.read("clas_float_prob",
         [&](const json& x, const std::string& p) { n.clas_float_prob = as_per_antenna(x, p); });
  s.read("mvrtk_sigma", [&](const json& x, const std::string& p) { n.mvrtk_sigma = as_vec3(x, p); });
  s.read("mvrtk_fix_prob",
         [&](const json& x, const std::string& p) { n.mvrtk_fix_prob = as_number(x, p); });
  s.read("mvrtk_float_sigma",
         [&](const json& x, const std::string& p) { n.mvrtk_float_sigma = as_number(x, p); });
  s.read("outlier_prob", [&](const json& x, const std::string& p) { n.outlier_prob = as_number(x, p); });
  s.read("outlier_magnitude",
         [&](const json& x, const std::string& p) { n.outlier_magnitude = as_number(x, p); });
  s.read("covariance_floor_sigma",
         [&](const json& x, const std::string& p) { n.covariance_floor_sigma = as_number(x, p); });
  s.finish();
  if (!float_given) n.clas_sigma_float = 5.0 * n.clas_sigma_fix;
}

void read_solver(const json& j, graph::SolverSettings& g, double& prior_variance) {
  Section s(j, "solver");
  s.read("max_iterations", [&](const json& x, const std::string& p) { g.max_iterations = as_int(x, p); });
  s.read("step_tolerance",
         [&](const json& x, const std::string& p) { g.step_tolerance = as_number(x, p); });
  s.read("huber_delta", [&](const json& x, const std::string& p) { g.huber_delta = as_number(x, p); });
  s.read("robust_clas", [&](const json& x, const std::string& p) { g.robust_clas = as_bool(x, p); });
  s.read("min_factor_count_per_antenna", [&](const json& x, const std::string& p) {
    g.min_factor_count_per_antenna = as_int(x, p);
  });
  s.read("max_step_halvings",
         [&](const json& x, const std::string& p) { g.max_step_halvings = as_int(x, p); });
  s.read("prior_variance",
         [&](const json& x, const std::string& p) { prior_variance = as_number(x, p); });
  s.finish();
}

}  // namespace

std::string_view to_string(Mode mode) {
  return mode == Mode::kProposed ? "proposed" : "clas_only";
}

Mode parse_mode(std::string_view text) {
  if (text == "proposed") return Mode::kProposed;
  if (text == "clas_only") return Mode::kClasOnly;
  throw ConfigError("mode must be 'proposed' or 'clas_only', got '" + std::string(text) + "'");
}

void RunConfig::validate() const {
  if (schema_version != kSchemaVersion) {
    throw ConfigError("schema_version must be " + std::to_string(kSchemaVersion));
  }
  vehicle.validate();
  trajectory.validate();
  noise.validate();
  solver.validate();
  if (!(prior_variance > 0.0)) throw ConfigError("solver.prior_variance must be > 0");
  if (origin) {
    try {
      geodesy::validate(*origin);
    } catch (const DataError& e) {
      throw ConfigError(std::string("origin: ") + e.what());
    }
  }
  if (measurement_frame == MeasurementFrame::kGeodetic && !origin) {
    throw ConfigError("measurement_frame 'geodetic' requires origin");
  }
}

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  bool rate_given = false;
  Section s(j, "");
  s.read("schema_version",
         [&](const json& x, const std::string& p) { cfg.schema_version = as_int(x, p); });
  s.read("mode", [&](const json& x, const std::string& p) { cfg.mode = parse_mode(as_string(x, p)); });
  s.read("seed", [&](const json& x, const std::string& p) {
    if (!x.is_number_unsigned()) throw ConfigError(p + " must be a non-negative integer");
    cfg.noise.rng_seed = x.get<std::uint64_t>();
  });
  s.read("out_dir", [&](const json& x, const std::string& p) { cfg.out_dir = as_string(x, p); });
  s.read("measurement_frame", [&](const json& x, const std::string& p) {
    const auto v = as_string(x, p);
    if (v == "enu") {
      cfg.measurement_frame = MeasurementFrame::kEnu;
    } else if (v == "geodetic") {
      cfg.measurement_frame = MeasurementFrame::kGeodetic;
    } else {
      throw ConfigError(p + " must be 'enu' or 'geodetic'");
    }
  });
  s.read("origin", [&](const json& x, const std::string&) {
    Section o(x, "origin");
    geodesy::GeodeticPosition g;
    o.read("lat_deg", [&](const json& y, const std::string& p) { g.latitude = deg2rad(as_number(y, p)); });
    o.read("lon_deg", [&](const json& y, const std::string& p) { g.longitude = deg2rad(as_number(y, p)); });
    o.read("h", [&](const json& y, const std::string& p) { g.height = as_number(y, p); });
    o.finish();
    cfg.origin = g;
  });
  s.read("vehicle", [&](const json& x, const std::string&) { read_vehicle(x, cfg.vehicle); });
  s.read("trajectory",
         [&](const json& x, const std::string&) { read_trajectory(x, cfg.trajectory, rate_given); });
  s.read("noise", [&](const json& x, const std::string&) { read_noise(x, cfg.noise); });
  s.read("solver",
         [&](const json& x, const std::string&) { read_solver(x, cfg.solver, cfg.prior_variance); });
  s.finish();
  if (!rate_given) cfg.trajectory.epoch_rate = cfg.vehicle.epoch_rate;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace artnav::pipeline

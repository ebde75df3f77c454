#include "artnav/records.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace artnav::io {

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

ojson cov_to_json(const Mat3& c) {
  return ojson::array({c(0, 0), c(0, 1), c(0, 2), c(1, 1), c(1, 2), c(2, 2)});
}

Mat3 cov_from_json(const json& j) {
  if (!j.is_array() || j.size() != 6) throw DataError("cov must be an array of 6 numbers");
  const auto v = j.get<std::vector<double>>();
  Mat3 c;
  c << v[0], v[1], v[2],
       v[1], v[3], v[4],
       v[2], v[4], v[5];
  return c;
}

const json& field(const json& obj, const char* key, const char* where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw DataError(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

double number(const json& obj, const char* key, const char* where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number()) throw DataError(std::string(where) + ": field '" + key + "' must be a number");
  return v.get<double>();
}

int integer(const json& obj, const char* key, const char* where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number_integer()) {
    throw DataError(std::string(where) + ": field '" + key + "' must be an integer");
  }
  return v.get<int>();
}

json parse_line(std::string_view line) {
  try {
    auto j = json::parse(line);
    if (!j.is_object()) throw DataError("record is not a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
}

bool has_geodetic_clas(const json& j) {
  if (!j.contains("clas") || !j["clas"].is_array()) return false;
  for (const auto& c : j["clas"]) {
    if (c.is_object() && c.contains("lat_deg")) return true;
  }
  return false;
}

geodesy::GeodeticPosition geodetic_of(const json& c) {
  return {deg2rad(number(c, "lat_deg", "clas")), deg2rad(number(c, "lon_deg", "clas")),
          number(c, "h", "clas")};
}

std::optional<geodesy::EnuOrigin> anchor_from(const json& j) {
  const json* best = nullptr;
  int best_ant = 99;
  for (const auto& c : j["clas"]) {
    if (!c.contains("lat_deg")) continue;
    const auto status = graph::parse_fix_status(field(c, "status", "clas").get<std::string>());
    if (status == graph::FixStatus::kNone) continue;
    const int ant = integer(c, "ant", "clas");
    if (ant < best_ant) {
      best_ant = ant;
      best = &c;
    }
  }
  if (best == nullptr) return std::nullopt;
  return geodesy::EnuOrigin(geodetic_of(*best));
}

graph::EpochProblem problem_from_json(const json& j,
                                      const std::optional<geodesy::EnuOrigin>& origin) {
  graph::EpochProblem p;
  p.timestamp = number(j, "timestamp", "record");
  if (!std::isfinite(p.timestamp)) throw DataError("record: timestamp must be finite");
  const auto& clas = field(j, "clas", "record");
  if (!clas.is_array()) throw DataError("record: 'clas' must be an array");
  for (const auto& c : clas) {
    graph::ClasFix fix;
    fix.antenna = AntennaId(integer(c, "ant", "clas"));
    fix.status = graph::parse_fix_status(field(c, "status", "clas").get<std::string>());
    if (c.contains("lat_deg")) {
      if (!origin) throw DataError("clas: geodetic position but no ENU origin available");
      const auto geo = geodetic_of(c);
      geodesy::validate(geo);
      fix.position = geodesy::geodetic_to_enu(geo, *origin);
    } else {
      fix.position = Vec3(number(c, "e", "clas"), number(c, "n", "clas"), number(c, "u", "clas"));
    }
    fix.covariance = cov_from_json(field(c, "cov", "clas"));
    p.clas.push_back(fix);
  }
  const auto& baselines = field(j, "baselines", "record");
  if (!baselines.is_array()) throw DataError("record: 'baselines' must be an array");
  for (const auto& b : baselines) {
    graph::BaselineObservation obs;
    obs.from = AntennaId(integer(b, "from", "baselines"));
    obs.to = AntennaId(integer(b, "to", "baselines"));
    const auto& fixed = field(b, "fixed", "baselines");
    if (!fixed.is_boolean()) throw DataError("baselines: field 'fixed' must be a boolean");
    obs.fixed = fixed.get<bool>();
    obs.baseline = Vec3(number(b, "de", "baselines"), number(b, "dn", "baselines"),
                        number(b, "du", "baselines"));
    obs.covariance = cov_from_json(field(b, "cov", "baselines"));
    p.baselines.push_back(obs);
  }
  graph::validate(p);
  return p;
}

}  // namespace

double round_timestamp(double t) { return std::round(t * 1000.0) / 1000.0; }

std::string format_measurement_record(const graph::EpochProblem& problem,
                                      const std::optional<geodesy::EnuOrigin>& geodetic_origin) {
  ojson j;
  j["timestamp"] = round_timestamp(problem.timestamp);
  ojson clas = ojson::array();
  for (const auto& fix : problem.clas) {
    ojson c;
    c["ant"] = fix.antenna.number();
    c["status"] = graph::to_string(fix.status);
    if (geodetic_origin) {
      const auto geo = geodesy::enu_to_geodetic(fix.position, *geodetic_origin);
      c["lat_deg"] = rad2deg(geo.latitude);
      c["lon_deg"] = rad2deg(geo.longitude);
      c["h"] = geo.height;
    } else {
      c["e"] = fix.position.x();
      c["n"] = fix.position.y();
      c["u"] = fix.position.z();
    }
    c["cov"] = cov_to_json(fix.covariance);
    clas.push_back(std::move(c));
  }
  j["clas"] = std::move(clas);
  ojson baselines = ojson::array();
  for (const auto& obs : problem.baselines) {
    ojson b;
    b["from"] = obs.from.number();
    b["to"] = obs.to.number();
    b["fixed"] = obs.fixed;
    b["de"] = obs.baseline.x();
    b["dn"] = obs.baseline.y();
    b["du"] = obs.baseline.z();
    b["cov"] = cov_to_json(obs.covariance);
    baselines.push_back(std::move(b));
  }
  j["baselines"] = std::move(baselines);
  return j.dump();
}

graph::EpochProblem parse_measurement_record(std::string_view line,
                                             const std::optional<geodesy::EnuOrigin>& origin) {
  try {
    return problem_from_json(parse_line(line), origin);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed record: ") + e.what());
  }
}

MeasurementReader::MeasurementReader(std::istream& in, std::optional<geodesy::EnuOrigin> origin)
    : in_(in), origin_(std::move(origin)) {}

std::optional<graph::EpochProblem> MeasurementReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = parse_line(line);
      if (!origin_ && has_geodetic_clas(j)) origin_ = anchor_from(j);
      auto problem = problem_from_json(j, origin_);
      if (last_timestamp_ && !(problem.timestamp > *last_timestamp_)) {
        throw DataError("timestamp " + std::to_string(problem.timestamp) +
                        " is not after the previous epoch");
      }
      last_timestamp_ = problem.timestamp;
      return problem;
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(line_) + ": malformed record: " + e.what());
    } catch (const Error& e) {
      throw DataError("line " + std::to_string(line_) + ": " + e.what());
    }
  }
  return std::nullopt;
}

std::string format_state_record(const StateRecord& record) {
  ojson j;
  j["timestamp"] = round_timestamp(record.timestamp);
  if (!record.state) {
    j["status"] = "failed";
    j["error"] = record.error;
    return j.dump();
  }
  const auto& s = *record.state;
  j["status"] = "ok";
  j["orientation_deg"] = rad2deg(s.orientation);
  j["articulation_deg"] = rad2deg(s.articulation);
  j["e"] = s.position.x();
  j["n"] = s.position.y();
  j["u"] = s.position.z();
  j["quality"] = vehicle::to_string(s.quality);
  ojson flags = ojson::array();
  if (s.articulation_beyond_limit) flags.push_back("articulation_beyond_limit");
  if (s.tilted) flags.push_back("tilted");
  j["flags"] = std::move(flags);
  if (record.iterations) j["iterations"] = *record.iterations;
  if (record.converged) j["converged"] = *record.converged;
  if (record.antennas) {
    ojson ants = ojson::array();
    for (const auto& p : record.antennas->positions) ants.push_back({p.x(), p.y(), p.z()});
    j["antennas"] = std::move(ants);
  }
  return j.dump();
}

StateRecord parse_state_record(std::string_view line) {
  try {
    const json j = parse_line(line);
    StateRecord r;
    r.timestamp = number(j, "timestamp", "record");
    const auto status = field(j, "status", "record").get<std::string>();
    if (status == "failed") {
      r.error = j.value("error", std::string{});
      return r;
    }
    if (status != "ok") throw DataError("record: unknown status '" + status + "'");
    vehicle::VehicleState s;
    s.timestamp = r.timestamp;
    s.orientation = deg2rad(number(j, "orientation_deg", "record"));
    s.articulation = deg2rad(number(j, "articulation_deg", "record"));
    s.position = Vec3(number(j, "e", "record"), number(j, "n", "record"), number(j, "u", "record"));
    s.quality = vehicle::parse_quality(field(j, "quality", "record").get<std::string>());
    if (j.contains("flags")) {
      for (const auto& f : j["flags"]) {
        const auto name = f.get<std::string>();
        s.articulation_beyond_limit |= name == "articulation_beyond_limit";
        s.tilted |= name == "tilted";
      }
    }
    r.state = s;
    if (j.contains("iterations")) r.iterations = j["iterations"].get<int>();
    if (j.contains("converged")) r.converged = j["converged"].get<bool>();
    if (j.contains("antennas")) {
      const auto& a = j["antennas"];
      if (!a.is_array() || a.size() != kAntennaCount) {
        throw DataError("record: 'antennas' must hold 4 positions");
      }
      AntennaStateVector x;
      for (int i = 0; i < kAntennaCount; ++i) {
        const auto v = a[static_cast<std::size_t>(i)].get<std::vector<double>>();
        if (v.size() != 3) throw DataError("record: antenna position must have 3 components");
        x.positions[i] = Vec3(v[0], v[1], v[2]);
      }
      r.antennas = x;
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed record: ") + e.what());
  }
}

std::vector<StateRecord> read_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<StateRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_state_record(line));
    } catch (const Error& e) {
      throw DataError(path + ":" + std::to_string(n) + ": " + e.what());
    }
    if (out.size() > 1 && !(out.back().timestamp > out[out.size() - 2].timestamp)) {
      throw DataError(path + ":" + std::to_string(n) + ": timestamps must strictly increase");
    }
  }
  return out;
}

}  // namespace artnav::io

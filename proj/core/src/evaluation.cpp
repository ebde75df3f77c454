#include "artnav/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace artnav::eval {

namespace {

using vehicle::VehicleState;
using ojson = nlohmann::ordered_json;

double circular_mean(std::span<const double> angles) {
  double s = 0.0;
  double c = 0.0;
  for (double a : angles) {
    s += std::sin(a);
    c += std::cos(a);
  }
  return std::atan2(s, c);
}

double population_std(std::span<const double> values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

std::vector<double> deviations_about_circular_mean(std::span<const double> angles) {
  const double m = circular_mean(angles);
  std::vector<double> out;
  out.reserve(angles.size());
  for (double a : angles) out.push_back(wrap_angle(a - m));
  return out;
}

std::string fixed(double v, int decimals = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// Rows of the text table: label plus one formatted cell per method.
std::string render_table(const std::string& title, const std::vector<std::string>& methods,
                         const std::vector<std::pair<std::string, std::vector<std::string>>>& rows) {
  std::size_t label_width = 0;
  for (const auto& [label, cells] : rows) label_width = std::max(label_width, label.size());
  std::vector<std::size_t> widths;
  for (std::size_t j = 0; j < methods.size(); ++j) {
    std::size_t w = methods[j].size();
    for (const auto& [label, cells] : rows) w = std::max(w, cells[j].size());
    widths.push_back(w);
  }
  std::ostringstream os;
  os << title << '\n';
  os << pad_right("", label_width);
  for (std::size_t j = 0; j < methods.size(); ++j) os << " | " << pad_left(methods[j], widths[j]);
  os << '\n';
  os << std::string(label_width, '-');
  for (std::size_t j = 0; j < methods.size(); ++j) os << "-+-" << std::string(widths[j], '-');
  os << '\n';
  for (const auto& [label, cells] : rows) {
    os << pad_right(label, label_width);
    for (std::size_t j = 0; j < methods.size(); ++j) os << " | " << pad_left(cells[j], widths[j]);
    os << '\n';
  }
  return os.str();
}

constexpr const char* kNoData = "no data";

}  // namespace

StaticRow static_statistics(std::span<const VehicleState> states) {
  if (states.size() < 2) throw EvaluationError("static statistics need at least 2 states");
  std::vector<double> orientation;
  std::vector<double> articulation;
  std::array<std::vector<double>, 3> position;
  for (const auto& s : states) {
    orientation.push_back(s.orientation);
    articulation.push_back(s.articulation);
    for (int k = 0; k < 3; ++k) position[k].push_back(s.position[k]);
  }
  StaticRow row;
  row.samples = states.size();
  row.orientation_std_deg = rad2deg(population_std(deviations_about_circular_mean(orientation)));
  row.articulation_std_deg = rad2deg(population_std(deviations_about_circular_mean(articulation)));
  for (int k = 0; k < 3; ++k) row.position_std_cm[k] = 100.0 * population_std(position[k]);
  return row;
}

Alignment align(std::span<const VehicleState> estimates, std::span<const VehicleState> reference,
                double tolerance) {
  Alignment out;
  if (reference.empty()) return out;
  std::vector<std::size_t> order(estimates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return estimates[a].timestamp < estimates[b].timestamp;
  });
  for (std::size_t r = 0; r < reference.size(); ++r) {
    const double t = reference[r].timestamp;
    auto it = std::lower_bound(order.begin(), order.end(), t, [&](std::size_t i, double v) {
      return estimates[i].timestamp < v;
    });
    std::optional<std::size_t> best;
    double best_dt = tolerance;
    for (auto cand : {it, it == order.begin() ? order.end() : std::prev(it)}) {
      if (cand == order.end()) continue;
      const double dt = std::abs(estimates[*cand].timestamp - t);
      if (dt <= best_dt + 1e-9) {
        if (!best || dt < std::abs(estimates[*best].timestamp - t)) best = *cand;
      }
    }
    if (best) out.pairs.emplace_back(*best, r);
  }
  out.coverage = static_cast<double>(out.pairs.size()) / static_cast<double>(reference.size());
  return out;
}

double median_period(std::span<const VehicleState> reference) {
  if (reference.size() < 2) throw EvaluationError("reference needs at least 2 epochs");
  std::vector<double> dt;
  for (std::size_t i = 1; i < reference.size(); ++i) {
    dt.push_back(reference[i].timestamp - reference[i - 1].timestamp);
  }
  std::nth_element(dt.begin(), dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2), dt.end());
  return dt[dt.size() / 2];
}

KinematicRow kinematic_rms(std::span<const VehicleState> estimates,
                           std::span<const VehicleState> reference) {
  const double period = median_period(reference);
  const auto alignment = align(estimates, reference, 0.5 * period);
  if (alignment.pairs.size() < 2 || alignment.coverage < 0.5) {
    throw EvaluationError("alignment failed: matched " + std::to_string(alignment.pairs.size()) +
                          " of " + std::to_string(reference.size()) + " reference epochs");
  }
  double so = 0.0;
  double sa = 0.0;
  Vec3 sp = Vec3::Zero();
  for (const auto& [e, r] : alignment.pairs) {
    const double dori = wrap_angle(estimates[e].orientation - reference[r].orientation);
    const double dart = wrap_angle(estimates[e].articulation - reference[r].articulation);
    const Vec3 dp = estimates[e].position - reference[r].position;
    so += dori * dori;
    sa += dart * dart;
    sp += dp.cwiseProduct(dp);
  }
  const double n = static_cast<double>(alignment.pairs.size());
  KinematicRow row;
  row.orientation_rms_deg = rad2deg(std::sqrt(so / n));
  row.articulation_rms_deg = rad2deg(std::sqrt(sa / n));
  row.position_rms_cm = 100.0 * (sp / n).cwiseSqrt();
  row.coverage = alignment.coverage;
  row.matched = alignment.pairs.size();
  return row;
}

Document emit_report(const StaticReport& report, ReportFormat format) {
  Document doc;
  for (const auto& m : report.methods) doc.complete = doc.complete && m.row.has_value();
  doc.complete = doc.complete && !report.methods.empty();

  if (format == ReportFormat::kJson) {
    ojson j;
    j["kind"] = "static";
    j["metric"] = "standard_deviation";
    ojson methods = ojson::array();
    for (const auto& m : report.methods) {
      ojson entry;
      entry["method"] = m.method;
      if (m.row) {
        entry["status"] = "ok";
        entry["orientation_deg"] = m.row->orientation_std_deg;
        entry["articulation_deg"] = m.row->articulation_std_deg;
        entry["east_cm"] = m.row->position_std_cm.x();
        entry["north_cm"] = m.row->position_std_cm.y();
        entry["up_cm"] = m.row->position_std_cm.z();
        entry["samples"] = m.row->samples;
      } else {
        entry["status"] = kNoData;
      }
      methods.push_back(entry);
    }
    j["methods"] = methods;
    doc.content = j.dump(2) + "\n";
    return doc;
  }

  std::vector<std::string> names;
  std::vector<std::pair<std::string, std::vector<std::string>>> rows = {
      {"Orientation angle deg", {}}, {"Articulation angle deg", {}}, {"Position East cm", {}},
      {"Position North cm", {}},     {"Position Up cm", {}},         {"Samples", {}}};
  for (const auto& m : report.methods) {
    names.push_back(m.method);
    if (!m.row) {
      for (auto& r : rows) r.second.emplace_back(kNoData);
      continue;
    }
    rows[0].second.push_back(fixed(m.row->orientation_std_deg));
    rows[1].second.push_back(fixed(m.row->articulation_std_deg));
    rows[2].second.push_back(fixed(m.row->position_std_cm.x()));
    rows[3].second.push_back(fixed(m.row->position_std_cm.y()));
    rows[4].second.push_back(fixed(m.row->position_std_cm.z()));
    rows[5].second.push_back(std::to_string(m.row->samples));
  }
  doc.content = render_table("Standard deviation of estimated states (static)", names, rows);
  return doc;
}

Document emit_report(const KinematicReport& report, ReportFormat format) {
  Document doc;
  for (const auto& m : report.methods) doc.complete = doc.complete && m.row.has_value();
  doc.complete = doc.complete && !report.methods.empty();

  if (format == ReportFormat::kJson) {
    ojson j;
    j["kind"] = "kinematic";
    j["metric"] = "rms_error";
    ojson methods = ojson::array();
    for (const auto& m : report.methods) {
      ojson entry;
      entry["method"] = m.method;
      if (m.row) {
        entry["status"] = "ok";
        entry["orientation_deg"] = m.row->orientation_rms_deg;
        entry["articulation_deg"] = m.row->articulation_rms_deg;
        entry["east_cm"] = m.row->position_rms_cm.x();
        entry["north_cm"] = m.row->position_rms_cm.y();
        entry["up_cm"] = m.row->position_rms_cm.z();
        entry["coverage"] = m.row->coverage;
        entry["matched"] = m.row->matched;
      } else {
        entry["status"] = kNoData;
      }
      methods.push_back(entry);
    }
    j["methods"] = methods;
    doc.content = j.dump(2) + "\n";
    return doc;
  }

  std::vector<std::string> names;
  std::vector<std::pair<std::string, std::vector<std::string>>> rows = {
      {"Orientation angle deg", {}}, {"Articulation angle deg", {}}, {"Position East cm", {}},
      {"Position North cm", {}},     {"Position Up cm", {}},         {"Coverage %", {}}};
  for (const auto& m : report.methods) {
    names.push_back(m.method);
    if (!m.row) {
      for (auto& r : rows) r.second.emplace_back(kNoData);
      continue;
    }
    rows[0].second.push_back(fixed(m.row->orientation_rms_deg));
    rows[1].second.push_back(fixed(m.row->articulation_rms_deg));
    rows[2].second.push_back(fixed(m.row->position_rms_cm.x()));
    rows[3].second.push_back(fixed(m.row->position_rms_cm.y()));
    rows[4].second.push_back(fixed(m.row->position_rms_cm.z()));
    rows[5].second.push_back(fixed(100.0 * m.row->coverage, 1));
  }
  doc.content = render_table("RMS error of estimated states (kinematic)", names, rows);
  return doc;
}

void write_static_csv_header(std::ostream& os) {
  os << "timestamp,method,orientation_dev_deg,articulation_dev_deg,east_dev_cm,north_dev_cm,"
        "up_dev_cm\n";
}

void write_static_csv(std::ostream& os, const std::string& method,
                      std::span<const VehicleState> states) {
  if (states.empty()) return;
  std::vector<double> orientation;
  std::vector<double> articulation;
  Vec3 mean = Vec3::Zero();
  for (const auto& s : states) {
    orientation.push_back(s.orientation);
    articulation.push_back(s.articulation);
    mean += s.position;
  }
  mean /= static_cast<double>(states.size());
  const double mo = circular_mean(orientation);
  const double ma = circular_mean(articulation);
  for (const auto& s : states) {
    const Vec3 d = 100.0 * (s.position - mean);
    os << fixed(s.timestamp) << ',' << method << ','
       << fixed(rad2deg(wrap_angle(s.orientation - mo)), 6) << ','
       << fixed(rad2deg(wrap_angle(s.articulation - ma)), 6) << ',' << fixed(d.x(), 6) << ','
       << fixed(d.y(), 6) << ',' << fixed(d.z(), 6) << '\n';
  }
}

void write_kinematic_csv_header(std::ostream& os) {
  os << "timestamp,method,orientation_err_deg,articulation_err_deg,east_err_cm,north_err_cm,"
        "up_err_cm\n";
}

void write_kinematic_csv(std::ostream& os, const std::string& method,
                         std::span<const VehicleState> estimates,
                         std::span<const VehicleState> reference) {
  if (reference.size() < 2) return;
  const auto alignment = align(estimates, reference, 0.5 * median_period(reference));
  for (const auto& [e, r] : alignment.pairs) {
    const Vec3 d = 100.0 * (estimates[e].position - reference[r].position);
    os << fixed(reference[r].timestamp) << ',' << method << ','
       << fixed(rad2deg(wrap_angle(estimates[e].orientation - reference[r].orientation)), 6)
       << ','
       << fixed(rad2deg(wrap_angle(estimates[e].articulation - reference[r].articulation)), 6)
       << ',' << fixed(d.x(), 6) << ',' << fixed(d.y(), 6) << ',' << fixed(d.z(), 6) << '\n';
  }
}

}  // namespace artnav::eval

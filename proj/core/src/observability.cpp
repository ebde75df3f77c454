#include <array>
#include <numeric>
#include <sstream>

#include "artnav/solver.hpp"

namespace artnav::graph {

std::string Observability::describe() const {
  if (well_posed) return "well posed";
  std::ostringstream os;
  os << "underdetermined: antenna";
  if (free_antennas.size() > 1) os << 's';
  for (const auto& id : free_antennas) os << ' ' << id.number();
  os << " not tied to any CLAS fix";
  return os.str();
}

Observability observability_check(const EpochProblem& problem) {
  std::array<int, kAntennaCount> parent{};
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& obs : problem.baselines) {
    if (!obs.fixed) continue;
    parent[find(static_cast<int>(obs.from.index()))] = find(static_cast<int>(obs.to.index()));
  }
  std::array<bool, kAntennaCount> anchored{};
  for (const auto& fix : problem.clas) {
    if (fix.admitted()) anchored[find(static_cast<int>(fix.antenna.index()))] = true;
  }
  Observability out;
  for (int i = 0; i < kAntennaCount; ++i) {
    if (!anchored[find(i)]) out.free_antennas.push_back(AntennaId::from_index(i));
  }
  out.well_posed = out.free_antennas.empty();
  return out;
}

}  // namespace artnav::graph

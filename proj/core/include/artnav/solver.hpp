#pragma once

#include <optional>
#include <string>
#include <vector>

#include "artnav/factor_graph.hpp"

namespace artnav::graph {

struct Observability {
  bool well_posed = false;
  /// Antennas not tied to any admitted CLAS fix through fixed baselines.
  std::vector<AntennaId> free_antennas;

  [[nodiscard]] std::string describe() const;
};

/// An antenna is positioned iff it is connected through fixed baselines to an
/// antenna that has an admitted CLAS fix. Length priors never position an
/// antenna.
[[nodiscard]] Observability observability_check(const EpochProblem& problem);

/// Seeds each antenna from, in order: `previous`, its own CLAS fix, a fixed
/// baseline to an already seeded antenna, or the section partner's CLAS fix
/// offset by the nominal spacing along east. Throws UnobservableProblem when
/// an antenna cannot be seeded.
[[nodiscard]] AntennaStateVector build_initial_guess(
    const EpochProblem& problem, const std::optional<AntennaStateVector>& previous);

/// Robust Gauss-Newton on one epoch's graph.
///
/// CLAS factors are reweighted with the Huber kernel on their whitened norm
/// (IRLS); moving-base and length factors stay quadratic. A step that raises
/// the robust cost is halved up to `max_step_halvings` times. Iteration stops
/// when the step norm drops below `step_tolerance` or after `max_iterations`
/// linearizations; non-convergence is reported, not thrown.
///
/// Throws UnobservableProblem, SingularSystem, DataError.
[[nodiscard]] SolveResult solve_epoch(const EpochProblem& problem,
                                      const SolverSettings& settings);

/// Robust cost of the objective at `state`. Length factors with degenerate
/// geometry are skipped.
[[nodiscard]] double evaluate_cost(const EpochProblem& problem, const SolverSettings& settings,
                                   const AntennaStateVector& state);

}  // namespace artnav::graph

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "agr/grid.hpp"

namespace agr {

// Cost-difference goal recognizer fed by the observer's raw detections. State
// updates only on Detected; NotDetected leaves everything untouched.
struct PassiveState {
  double beta = 1.0;
  int width = 0;
  std::vector<Cell> goals;
  // per goal: optimal steps-to-go from each cell (cell_index keyed; obstacles
  // and cut-off cells carry a negative sentinel meaning unreachable)
  std::vector<std::vector<int>> optc;
  // accumulated cost difference per goal; +inf is sticky once a goal's
  // remaining cost ever becomes unreachable
  std::vector<double> cdiff;
  std::optional<Cell> last_seen;
  int last_seen_step = -1;
};

inline constexpr int kPassiveUnreachable = -1;

// distances use cell moves with unit cost, heading-free (4-neighbor BFS)
PassiveState passive_init(const GridMap& map, std::span<const Cell> goals,
                          double beta = 1.0);

// folds one observation at step t into the accumulated cost differences:
// on a new detection at p following a previous one at q,
// cdiff(g) += optc(p, g) + elapsed(q, p) - optc(q, g)
PassiveState passive_update(const PassiveState& state, const Observation& o, int t);

// P(g | history) with the bounded sigmoid link over cdiff, normalized;
// goals with infinite cdiff get exactly zero
std::vector<double> passive_posterior(const PassiveState& state);

}  // namespace agr

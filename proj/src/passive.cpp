#include "agr/passive.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "agr/errors.hpp"

namespace agr {

PassiveState passive_init(const GridMap& map, std::span<const Cell> goals, double beta) {
  if (goals.empty()) throw EmptyGoalSet("passive recognizer needs at least one goal");
  if (beta < 0.0) throw std::invalid_argument("beta must be non-negative");
  PassiveState st;
  st.beta = beta;
  st.width = map.width();
  st.goals.assign(goals.begin(), goals.end());
  st.optc.reserve(goals.size());
  // BFS from the goal equals BFS to the goal: unit steps, symmetric moves
  for (Cell g : goals) st.optc.push_back(cell_distance_field(map, g));
  st.cdiff.assign(goals.size(), 0.0);
  return st;
}

PassiveState passive_update(const PassiveState& state, const Observation& o, int t) {
  if (!o.is_detected()) return state;
  PassiveState st = state;
  const Cell p = o.position();
  if (st.last_seen) {
    const Cell q = *st.last_seen;
    const double steps = static_cast<double>(t - st.last_seen_step);
    for (size_t g = 0; g < st.goals.size(); ++g) {
      if (std::isinf(st.cdiff[g])) continue;  // sticky once unreachable
      int to_new = st.optc[g][p.r * st.width + p.c];
      int to_old = st.optc[g][q.r * st.width + q.c];
      if (to_new < 0 || to_old < 0) {
        st.cdiff[g] = std::numeric_limits<double>::infinity();
        continue;
      }
      st.cdiff[g] += to_new + steps - to_old;
    }
  }
  st.last_seen = p;
  st.last_seen_step = t;
  return st;
}

std::vector<double> passive_posterior(const PassiveState& state) {
  const size_t G = state.goals.size();
  std::vector<double> post(G, 1.0 / static_cast<double>(G));
  if (!state.last_seen) return post;  // prior until the first detection
  double total = 0.0;
  for (size_t g = 0; g < G; ++g) {
    double w = 0.0;
    if (!std::isinf(state.cdiff[g])) {
      double x = state.beta * state.cdiff[g];
      w = std::exp(-x) / (1.0 + std::exp(-x));
    }
    post[g] = w;
    total += w;
  }
  if (total <= 0.0) {
    // every goal unreachable from the observed cells; keep the prior
    for (size_t g = 0; g < G; ++g) post[g] = 1.0 / static_cast<double>(G);
    return post;
  }
  for (size_t g = 0; g < G; ++g) post[g] /= total;
  return post;
}

}  // namespace agr

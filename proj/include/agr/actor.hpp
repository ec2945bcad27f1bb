#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "agr/grid.hpp"

namespace agr {

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

inline constexpr int kMinCellCost = 1;
inline constexpr int kMaxCellCost = 5;

// per-free-cell traversal cost, private to the actor
struct CostMap {
  std::vector<int> cost_by_free;
  int cost(const GridMap& map, Cell p) const { return cost_by_free[map.free_index(p)]; }
};

// independent costs Uniform{1..5} over free cells in row-major order
CostMap generate_cost_map(const GridMap& map, uint64_t seed);

struct ActorPlan {
  Cell goal;
  std::vector<Action> actions;  // one per step, start pose to first arrival at goal
  int total_cost = 0;
};

// Cheapest action sequence to the goal cell (any final heading): Forward into
// cell c costs costs(c), turns cost 1, Stay is never useful. Throws
// UnreachableGoal. Equal-cost ties resolve to the earliest-discovered path
// with neighbors expanded in fixed action order.
ActorPlan plan_actor_path(const GridMap& map, const CostMap& costs,
                          const AgentPose& start, Cell goal);

// Goal-conditioned epsilon-greedy model of the actor used by the observer.
// Distance fields are position BFS step counts ignoring headings (the
// observer knows neither the private costs nor turn dynamics details); a
// moving Forward is scored at the new cell, everything else at the current
// cell, greedy ties split uniformly on top of the eps/4 floor.
class ActorModel {
 public:
  ActorModel(const GridMap& map, std::vector<Cell> goals, double epsilon);

  double epsilon() const { return epsilon_; }
  int num_goals() const { return static_cast<int>(goals_.size()); }
  Cell goal(int g) const { return goals_[g]; }
  int goal_index(Cell p) const;  // -1 when p is not a candidate goal
  // per cell_index step counts to goal g; -1 marks unreachable cells
  const std::vector<int>& field(int g) const { return fields_[g]; }
  std::span<const Cell> goals() const { return goals_; }

 private:
  double epsilon_;
  std::vector<Cell> goals_;
  std::vector<std::vector<int>> fields_;
};

std::array<double, kNumActions> actor_model_distribution(const ActorModel& model,
                                                         const GridMap& map,
                                                         const AgentPose& s, int g);

// row-stochastic pose transition kernel for one goal, CSR with rows sorted by
// destination index; blocked Forward merges with Stay so rows have <= 4 entries
struct TransitionMatrix {
  int n = 0;
  std::vector<int32_t> offsets;  // n + 1
  std::vector<int32_t> dests;
  std::vector<double> probs;
};

TransitionMatrix actor_transition_matrix(const ActorModel& model, const GridMap& map,
                                         int g);
std::vector<TransitionMatrix> actor_transition_matrices(const ActorModel& model,
                                                        const GridMap& map);

}  // namespace agr

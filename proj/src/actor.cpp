#include "agr/actor.hpp"

#include <algorithm>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "agr/errors.hpp"
#include "agr/rng.hpp"

namespace agr {

CostMap generate_cost_map(const GridMap& map, uint64_t seed) {
  Rng rng(seed);
  CostMap cm;
  cm.cost_by_free.resize(static_cast<size_t>(map.free_cell_count()));
  for (int i = 0; i < map.free_cell_count(); ++i)
    cm.cost_by_free[i] = rng.uniform_int(kMinCellCost, kMaxCellCost);
  return cm;
}

ActorPlan plan_actor_path(const GridMap& map, const CostMap& costs,
                          const AgentPose& start, Cell goal) {
  if (!map.is_free(goal)) throw UnreachableGoal("goal cell is not free");
  const int start_idx = map.pose_index(start);
  if (start_idx < 0) throw std::invalid_argument("actor start is not a free cell");

  const int n = map.pose_count();
  std::vector<int64_t> dist(static_cast<size_t>(n), -1);
  std::vector<int32_t> parent(static_cast<size_t>(n), -1);
  std::vector<int8_t> parent_action(static_cast<size_t>(n), -1);

  // (cost, push tick, pose): the tick makes equal-cost pops FIFO, so ties
  // settle to the earliest push with neighbors expanded in action order
  using Entry = std::tuple<int64_t, int64_t, int32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
  int64_t tick = 0;
  pq.emplace(0, tick++, start_idx);
  dist[start_idx] = 0;

  int settled_goal = -1;
  std::vector<int8_t> done(static_cast<size_t>(n), 0);
  while (!pq.empty()) {
    auto [d, t, si] = pq.top();
    pq.pop();
    if (done[si]) continue;
    done[si] = 1;
    AgentPose s = map.pose_at(si);
    if (s.position == goal) {
      settled_goal = si;
      break;
    }
    const Action acts[3] = {Action::Forward, Action::TurnLeft, Action::TurnRight};
    for (Action a : acts) {
      AgentPose s2 = step_pose(map, s, a, false);
      if (a == Action::Forward && s2.position == s.position) continue;  // blocked
      int64_t step = a == Action::Forward ? costs.cost(map, s2.position) : 1;
      int i2 = map.pose_index(s2);
      if (dist[i2] < 0 || d + step < dist[i2]) {
        dist[i2] = d + step;
        parent[i2] = si;
        parent_action[i2] = static_cast<int8_t>(a);
        pq.emplace(d + step, tick++, i2);
      }
    }
  }
  if (settled_goal < 0) throw UnreachableGoal("no path from actor start to goal");

  ActorPlan plan;
  plan.goal = goal;
  plan.total_cost = static_cast<int>(dist[settled_goal]);
  for (int i = settled_goal; parent[i] >= 0; i = parent[i])
    plan.actions.push_back(static_cast<Action>(parent_action[i]));
  std::reverse(plan.actions.begin(), plan.actions.end());
  return plan;
}

ActorModel::ActorModel(const GridMap& map, std::vector<Cell> goals, double epsilon)
    : epsilon_(epsilon), goals_(std::move(goals)) {
  if (goals_.empty()) throw EmptyGoalSet("actor model needs at least one goal");
  fields_.reserve(goals_.size());
  for (Cell g : goals_) fields_.push_back(cell_distance_field(map, g));
}

int ActorModel::goal_index(Cell p) const {
  for (size_t i = 0; i < goals_.size(); ++i)
    if (goals_[i] == p) return static_cast<int>(i);
  return -1;
}

std::array<double, kNumActions> actor_model_distribution(const ActorModel& model,
                                                         const GridMap& map,
                                                         const AgentPose& s, int g) {
  const std::vector<int>& field = model.field(g);
  auto steps = [&](Cell p) {
    int d = field[static_cast<size_t>(map.cell_index(p))];
    return d < 0 ? kUnreachable : d;
  };
  const int cur = steps(s.position);
  // a Forward that moves is scored at the new cell; turns, Stay, and a
  // blocked Forward keep the current cell's distance
  std::array<int, kNumActions> after{};
  for (int a = 0; a < kNumActions; ++a) {
    AgentPose s2 = step_pose(map, s, static_cast<Action>(a), false);
    after[a] = s2.position == s.position ? cur : steps(s2.position);
  }
  int best = *std::min_element(after.begin(), after.end());
  int nbest = 0;
  for (int a = 0; a < kNumActions; ++a)
    if (after[a] == best) ++nbest;
  const double eps = model.epsilon();
  std::array<double, kNumActions> p{};
  for (int a = 0; a < kNumActions; ++a)
    p[a] = eps / kNumActions + (after[a] == best ? (1.0 - eps) / nbest : 0.0);
  return p;
}

TransitionMatrix actor_transition_matrix(const ActorModel& model, const GridMap& map,
                                         int g) {
  const int n = map.pose_count();
  TransitionMatrix tm;
  tm.n = n;
  tm.offsets.reserve(static_cast<size_t>(n) + 1);
  tm.offsets.push_back(0);
  tm.dests.reserve(static_cast<size_t>(n) * kNumActions);
  tm.probs.reserve(static_cast<size_t>(n) * kNumActions);
  for (int i = 0; i < n; ++i) {
    AgentPose s = map.pose_at(i);
    auto p = actor_model_distribution(model, map, s, g);
    // gather successors, merging duplicates (blocked Forward lands on Stay)
    std::array<std::pair<int32_t, double>, kNumActions> ent;
    int ne = 0;
    for (int a = 0; a < kNumActions; ++a) {
      int32_t j = static_cast<int32_t>(
          map.pose_index(step_pose(map, s, static_cast<Action>(a), false)));
      bool merged = false;
      for (int k = 0; k < ne; ++k) {
        if (ent[k].first == j) {
          ent[k].second += p[a];
          merged = true;
          break;
        }
      }
      if (!merged) ent[ne++] = {j, p[a]};
    }
    std::sort(ent.begin(), ent.begin() + ne);
    for (int k = 0; k < ne; ++k) {
      tm.dests.push_back(ent[k].first);
      tm.probs.push_back(ent[k].second);
    }
    tm.offsets.push_back(static_cast<int32_t>(tm.dests.size()));
  }
  return tm;
}

std::vector<TransitionMatrix> actor_transition_matrices(const ActorModel& model,
                                                        const GridMap& map) {
  std::vector<TransitionMatrix> out;
  out.reserve(static_cast<size_t>(model.num_goals()));
  for (int g = 0; g < model.num_goals(); ++g)
    out.push_back(actor_transition_matrix(model, map, g));
  return out;
}

}  // namespace agr

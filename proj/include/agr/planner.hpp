#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "agr/belief.hpp"
#include "agr/grid.hpp"
#include "agr/rng.hpp"

namespace agr {

// reward fed to MCTS; the heuristic variant exists for ablation only
enum class MctsReward { BeliefSquared, GreedyHeuristic };

struct PlannerConfig {
  double gamma = 0.95;
  double ucb_c = 1.4142135623730951;  // sqrt(2)
  int iterations = 100;
  int max_depth = 10;
  double entropy_weight = 0.5;  // lambda
  uint64_t rng_seed = 0;
  double epsilon = 0.1;  // actor model mixing used inside simulations
  MctsReward reward = MctsReward::BeliefSquared;
  bool validate = false;  // post-search tree invariant checks
};

struct PolicyDecision {
  Action action = Action::Forward;
  std::array<double, kNumActions> q_estimates{};
  std::array<int, kNumActions> visit_counts{};
  int tree_depth_reached = 0;
};

// environment bundle shared by a planner's simulations
struct PlannerContext {
  const GridMap* map = nullptr;
  std::span<const TransitionMatrix> transitions;  // one per goal column
  BeliefConfig belief_cfg{};
  FovConfig fov{};
};

// total per-step reward R_total(j) = belief_reward + lambda * (1 - entropy)
double total_reward(const JointBelief& j, double entropy_weight);

PolicyDecision mcts_select_action(const JointBelief& j, const AgentPose& u,
                                  const PlannerContext& ctx, const PlannerConfig& cfg);

PolicyDecision belief_greedy_action(const JointBelief& j, const AgentPose& u,
                                    const GridMap& map);

PolicyDecision search_and_follow_action(std::span<const Observation> history,
                                        const AgentPose& u, const GridMap& map);

PolicyDecision random_action(Rng& rng);

// minimum actions from pose to cell ignoring obstacles (moves + turns),
// final heading free; closed form, exact on an empty bounded grid
int turn_aware_distance(const AgentPose& from, Cell to);

// serpentine sweep path: swath-center columns spaced one window width apart,
// alternating down/up, joined along the boundary rows
std::vector<Cell> sweep_path(const GridMap& map, const FovConfig& fov = {});

enum class Algorithm { PassiveRandom = 0, SearchFollow = 1, BeliefGreedy = 2, AgrMcts = 3 };

std::string_view algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);
// whether the strategy consumes the joint belief to act
bool algorithm_uses_joint(Algorithm a);

struct PolicyInput {
  int t = 0;
  AgentPose observer;
  const JointBelief* belief = nullptr;  // null when the joint pipeline is off
  std::span<const Observation> history;  // o_0 .. o_t
};

class ObserverPolicy {
 public:
  virtual ~ObserverPolicy() = default;
  virtual PolicyDecision decide(const PolicyInput& in) = 0;
};

// one policy instance per episode; episode_seed isolates its random streams
std::unique_ptr<ObserverPolicy> make_policy(Algorithm a, const PlannerContext& ctx,
                                            const PlannerConfig& cfg,
                                            uint64_t episode_seed);

}  // namespace agr

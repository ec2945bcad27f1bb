#include "agr/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "agr/errors.hpp"

namespace agr {

double total_reward(const JointBelief& j, double entropy_weight) {
  return belief_reward(j) + entropy_weight * (1.0 - actor_state_entropy(j));
}

namespace {

int angle_between(Direction a, Direction b) {
  int d = (static_cast<int>(a) - static_cast<int>(b) + 4) % 4;
  return std::min(d, 4 - d);
}

Cell most_likely_position(const JointBelief& j, const GridMap& map) {
  const int S = j.num_poses();
  const int F = S / kNumDirections;
  std::vector<double> mass(static_cast<size_t>(F), 0.0);
  for (int g = 0; g < j.num_goals(); ++g) {
    auto col = j.goal_column(g);
    for (int s = 0; s < S; ++s) mass[s / kNumDirections] += col[s];
  }
  // free index order is row-major, so strict > realizes the tie-break
  int best = 0;
  for (int f = 1; f < F; ++f)
    if (mass[f] > mass[best]) best = f;
  return map.free_cell(best);
}

PolicyDecision move_toward(const AgentPose& u, Cell target, const GridMap& map) {
  PolicyDecision d;
  int best = std::numeric_limits<int>::max();
  for (int a = 0; a < kNumActions; ++a) {
    AgentPose u2 = step_pose(map, u, static_cast<Action>(a), true);
    int dist = turn_aware_distance(u2, target);
    d.q_estimates[a] = -static_cast<double>(dist);
    if (dist < best) {
      best = dist;
      d.action = static_cast<Action>(a);
    }
  }
  return d;
}

}  // namespace

int turn_aware_distance(const AgentPose& from, Cell to) {
  const int dr = to.r - from.position.r;
  const int dc = to.c - from.position.c;
  const int moves = std::abs(dr) + std::abs(dc);
  if (moves == 0) return 0;
  int turns;
  if (dr != 0 && dc != 0) {
    Direction dir_r = dr < 0 ? Direction::North : Direction::South;
    Direction dir_c = dc > 0 ? Direction::East : Direction::West;
    turns = 1 + std::min(angle_between(from.heading, dir_r),
                         angle_between(from.heading, dir_c));
  } else if (dr != 0) {
    turns = angle_between(from.heading, dr < 0 ? Direction::North : Direction::South);
  } else {
    turns = angle_between(from.heading, dc > 0 ? Direction::East : Direction::West);
  }
  return moves + turns;
}

PolicyDecision belief_greedy_action(const JointBelief& j, const AgentPose& u,
                                    const GridMap& map) {
  return move_toward(u, most_likely_position(j, map), map);
}

std::vector<Cell> sweep_path(const GridMap& map, const FovConfig& fov) {
  const int stride = 2 * fov.half_width + 1;
  std::vector<int> cols;
  for (int c = fov.half_width; c < map.width(); c += stride) cols.push_back(c);
  if (cols.empty()) cols.push_back(0);
  std::vector<Cell> path;
  bool down = true;
  for (size_t k = 0; k < cols.size(); ++k) {
    const int c = cols[k];
    if (down)
      for (int r = 0; r < map.height(); ++r) path.push_back({r, c});
    else
      for (int r = map.height() - 1; r >= 0; --r) path.push_back({r, c});
    if (k + 1 < cols.size()) {
      const int row = down ? map.height() - 1 : 0;
      for (int cc = c + 1; cc < cols[k + 1]; ++cc) path.push_back({row, cc});
    }
    down = !down;
  }
  return path;
}

PolicyDecision search_and_follow_action(std::span<const Observation> history,
                                        const AgentPose& u, const GridMap& map) {
  // follow mode latches on the most recent detection, ever
  for (auto it = history.rbegin(); it != history.rend(); ++it)
    if (it->is_detected()) return move_toward(u, it->position(), map);

  // sweep mode: walk the serpentine path; joining it from anywhere is just
  // moving toward the nearest path cell, so no sweep progress state is needed
  const auto path = sweep_path(map);
  size_t nearest = 0;
  int bd = std::numeric_limits<int>::max();
  for (size_t i = 0; i < path.size(); ++i) {
    int d = std::abs(path[i].r - u.position.r) + std::abs(path[i].c - u.position.c);
    if (d < bd) {
      bd = d;
      nearest = i;
    }
  }
  Cell target = bd == 0 ? path[(nearest + 1) % path.size()] : path[nearest];
  return move_toward(u, target, map);
}

PolicyDecision random_action(Rng& rng) {
  PolicyDecision d;
  d.action = static_cast<Action>(rng.bounded(kNumActions));
  return d;
}

namespace {

// ---- AGR-MCTS ----

struct OutcomeKey {
  AgentPose u;
  Observation o;
  bool operator==(const OutcomeKey&) const = default;
};

struct OutcomeKeyHash {
  size_t operator()(const OutcomeKey& k) const {
    size_t h = std::hash<AgentPose>()(k.u);
    if (k.o.is_detected()) h = h * 2654435761u + std::hash<Cell>()(k.o.position()) + 1;
    return h;
  }
};

struct ChanceNode;

struct DecisionNode {
  AgentPose u;
  JointBelief j;
  double reward = 0.0;  // R_total(j), cached at creation
  int visits = 1;       // counts its own expansion
  double value = 0.0;   // running mean of backed-up returns
  std::array<std::unique_ptr<ChanceNode>, kNumActions> children;
};

struct ChanceNode {
  int visits = 0;
  double value = 0.0;  // running mean of gamma-discounted child returns
  std::unordered_map<OutcomeKey, std::unique_ptr<DecisionNode>, OutcomeKeyHash> children;
};

// value differences below this fraction of the return bound are treated as
// statistical ties so the exploration bonus, not sampling noise, allocates
// the remaining visits
constexpr double kSpanFloor = 0.10;

class Search {
 public:
  Search(const PlannerContext& ctx, const PlannerConfig& cfg)
      : ctx_(ctx), cfg_(cfg), rng_(cfg.rng_seed),
        scratch_(static_cast<size_t>(cfg.max_depth)) {
    // every backed-up return must land in this window (BeliefSquared only);
    // with annuity tails the geometric sum telescopes to exactly this bound
    double per_step = 1.0 + cfg.entropy_weight;
    bound_hi_ = cfg.gamma < 1.0 ? per_step / (1.0 - cfg.gamma)
                                : per_step * (2 * cfg.max_depth + 1);
  }

  double node_reward(const AgentPose& u, const JointBelief& j) const {
    if (cfg_.reward == MctsReward::BeliefSquared)
      return total_reward(j, cfg_.entropy_weight);
    // ablation-only heuristic mirror of the greedy baseline's objective
    return -static_cast<double>(
        turn_aware_distance({u.position, u.heading}, most_likely_position(j, *ctx_.map)));
  }

  // truncated branches stand in for the whole tail: holding the current
  // reward forever keeps every return on the same infinite-horizon scale,
  // so subtrees of different depths stay comparable under UCB
  double tail_value(double reward) const {
    return cfg_.gamma < 1.0 ? reward / (1.0 - cfg_.gamma)
                            : reward * (cfg_.max_depth + 1);
  }

  double root_value(double reward) const { return tail_value(reward); }

  double simulate(DecisionNode& node, int depth) {
    depth_reached_ = std::max(depth_reached_, depth);
    if (depth >= cfg_.max_depth) {
      node.visits += 1;  // value is the mean of identical returns, unchanged
      return node.value;
    }
    const int a = select_ucb(node);
    if (!node.children[a]) node.children[a] = std::make_unique<ChanceNode>();
    ChanceNode& cn = *node.children[a];

    JointBelief& pred = scratch_[depth];
    predict_into(node.j, ctx_.transitions, pred);
    auto [sg, ss] = sample_joint(pred);
    const AgentPose u2 = step_pose(*ctx_.map, node.u, static_cast<Action>(a), true);
    const Observation o2 = observe(*ctx_.map, u2, ctx_.map->pose_at(ss), ctx_.fov);

    double child_ret;
    const OutcomeKey key{u2, o2};
    auto it = cn.children.find(key);
    if (it == cn.children.end()) {
      auto child = std::make_unique<DecisionNode>();
      child->u = u2;
      child->j = update(pred, *ctx_.map, u2, o2, ctx_.belief_cfg, ctx_.fov);
      child->reward = node_reward(u2, child->j);
      child->value = tail_value(child->reward);
      child_ret = child->value;
      depth_reached_ = std::max(depth_reached_, depth + 1);
      cn.children.emplace(key, std::move(child));
    } else {
      child_ret = simulate(*it->second, depth + 1);
    }

    cn.visits += 1;
    cn.value += (cfg_.gamma * child_ret - cn.value) / cn.visits;

    const double ret = node.reward + cfg_.gamma * child_ret;
    node.visits += 1;
    node.value += (ret - node.value) / node.visits;
    if (cfg_.validate && cfg_.reward == MctsReward::BeliefSquared &&
        (ret < -1e-9 || ret > bound_hi_ + 1e-9))
      throw Error("mcts backup out of bounds");
    return ret;
  }

  int depth_reached() const { return depth_reached_; }

 private:
  int select_ucb(const DecisionNode& node) {
    for (int a = 0; a < kNumActions; ++a)
      if (!node.children[a]) return a;  // untried first, fixed order
    // UCB1 assumes [0,1] rewards; returns here live on an arbitrary
    // discounted-sum scale, so the exploit term is min-max normalized over
    // this node's children before the pinned exploration constant applies
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& cn : node.children) {
      lo = std::min(lo, cn->value);
      hi = std::max(hi, cn->value);
    }
    const double span = std::max(hi - lo, kSpanFloor * bound_hi_);
    const double log_n = std::log(static_cast<double>(node.visits));
    int best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumActions; ++a) {
      const ChanceNode& cn = *node.children[a];
      double v = (cn.value - lo) / span + cfg_.ucb_c * std::sqrt(log_n / cn.visits);
      if (v > best_v) {
        best_v = v;
        best = a;
      }
    }
    return best;
  }

  // one draw from the joint, scanned goal-major in pinned order
  std::pair<int, int> sample_joint(const JointBelief& pred) {
    const double r = rng_.uniform01() * pred.total_mass();
    double acc = 0.0;
    int lg = 0, ls = 0;
    for (int g = 0; g < pred.num_goals(); ++g) {
      auto col = pred.goal_column(g);
      for (int s = 0; s < pred.num_poses(); ++s) {
        const double w = col[s];
        if (w > 0.0) {
          lg = g;
          ls = s;
          acc += w;
          if (r < acc) return {g, s};
        }
      }
    }
    return {lg, ls};  // rounding fallback: last positive entry
  }

  const PlannerContext& ctx_;
  const PlannerConfig& cfg_;
  Rng rng_;
  std::vector<JointBelief> scratch_;
  double bound_hi_ = 0.0;
  int depth_reached_ = 0;
};

void validate_tree(const DecisionNode& node) {
  bool any_child = false;
  int chance_total = 0;
  for (const auto& cn : node.children) {
    if (!cn) continue;
    any_child = true;
    chance_total += cn->visits;
    int child_total = 0;
    for (const auto& [key, child] : cn->children) {
      child_total += child->visits;
      validate_tree(*child);
    }
    if (cn->visits != child_total) throw Error("chance node visit count inconsistent");
  }
  // depth-capped and leaf nodes have no children and are exempt
  if (any_child && node.visits != 1 + chance_total)
    throw Error("decision node visit count inconsistent");
}

}  // namespace

PolicyDecision mcts_select_action(const JointBelief& j, const AgentPose& u,
                                  const PlannerContext& ctx, const PlannerConfig& cfg) {
  if (cfg.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (cfg.max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (cfg.gamma < 0.0 || cfg.gamma > 1.0) throw std::invalid_argument("gamma out of range");

  Search search(ctx, cfg);
  DecisionNode root;
  root.u = u;
  root.j = j;
  root.reward = search.node_reward(u, j);
  root.value = search.root_value(root.reward);
  for (int i = 0; i < cfg.iterations; ++i) search.simulate(root, 0);
  if (cfg.validate) validate_tree(root);

  PolicyDecision d;
  int best_visits = -1;
  for (int a = 0; a < kNumActions; ++a) {
    const auto& cn = root.children[a];
    d.q_estimates[a] = cn ? cn->value : 0.0;
    d.visit_counts[a] = cn ? cn->visits : 0;
    if (d.visit_counts[a] > best_visits) {
      best_visits = d.visit_counts[a];
      d.action = static_cast<Action>(a);
    }
  }
  d.tree_depth_reached = search.depth_reached();
  return d;
}

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::PassiveRandom: return "passive-random";
    case Algorithm::SearchFollow: return "search-follow";
    case Algorithm::BeliefGreedy: return "belief-greedy";
    case Algorithm::AgrMcts: return "agr-mcts";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::PassiveRandom, Algorithm::SearchFollow,
                      Algorithm::BeliefGreedy, Algorithm::AgrMcts})
    if (name == algorithm_name(a)) return a;
  return std::nullopt;
}

bool algorithm_uses_joint(Algorithm a) {
  return a == Algorithm::BeliefGreedy || a == Algorithm::AgrMcts;
}

namespace {

class MctsPolicy : public ObserverPolicy {
 public:
  MctsPolicy(const PlannerContext& ctx, const PlannerConfig& cfg, uint64_t seed)
      : ctx_(ctx), cfg_(cfg), seed_(seed) {}
  PolicyDecision decide(const PolicyInput& in) override {
    if (!in.belief) throw std::invalid_argument("agr-mcts needs the joint belief");
    PlannerConfig cfg = cfg_;
    cfg.rng_seed = derive_seed(seed_, static_cast<uint64_t>(in.t));
    return mcts_select_action(*in.belief, in.observer, ctx_, cfg);
  }

 private:
  PlannerContext ctx_;
  PlannerConfig cfg_;
  uint64_t seed_;
};

class GreedyPolicy : public ObserverPolicy {
 public:
  explicit GreedyPolicy(const GridMap* map) : map_(map) {}
  PolicyDecision decide(const PolicyInput& in) override {
    if (!in.belief) throw std::invalid_argument("belief-greedy needs the joint belief");
    return belief_greedy_action(*in.belief, in.observer, *map_);
  }

 private:
  const GridMap* map_;
};

class SearchFollowPolicy : public ObserverPolicy {
 public:
  explicit SearchFollowPolicy(const GridMap* map) : map_(map) {}
  PolicyDecision decide(const PolicyInput& in) override {
    return search_and_follow_action(in.history, in.observer, *map_);
  }

 private:
  const GridMap* map_;
};

class RandomPolicy : public ObserverPolicy {
 public:
  explicit RandomPolicy(uint64_t seed) : rng_(seed) {}
  PolicyDecision decide(const PolicyInput&) override { return random_action(rng_); }

 private:
  Rng rng_;
};

}  // namespace

std::unique_ptr<ObserverPolicy> make_policy(Algorithm a, const PlannerContext& ctx,
                                            const PlannerConfig& cfg,
                                            uint64_t episode_seed) {
  switch (a) {
    case Algorithm::PassiveRandom:
      return std::make_unique<RandomPolicy>(derive_seed(episode_seed, 0x52414E44ULL));
    case Algorithm::SearchFollow:
      return std::make_unique<SearchFollowPolicy>(ctx.map);
    case Algorithm::BeliefGreedy:
      return std::make_unique<GreedyPolicy>(ctx.map);
    case Algorithm::AgrMcts:
      return std::make_unique<MctsPolicy>(ctx, cfg, derive_seed(episode_seed, 0x4D435453ULL));
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace agr

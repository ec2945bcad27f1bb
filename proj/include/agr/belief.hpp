#pragma once

#include <span>
#include <vector>

#include "agr/actor.hpp"
#include "agr/grid.hpp"

namespace agr {

// Dense joint distribution over (actor pose, candidate goal), stored
// goal-major so per-goal columns are contiguous.
class JointBelief {
 public:
  JointBelief() = default;
  JointBelief(int num_poses, int num_goals)
      : num_poses_(num_poses), num_goals_(num_goals),
        p_(static_cast<size_t>(num_poses) * num_goals, 0.0) {}

  int num_poses() const { return num_poses_; }
  int num_goals() const { return num_goals_; }
  bool empty() const { return p_.empty(); }

  double at(int pose, int g) const { return p_[static_cast<size_t>(g) * num_poses_ + pose]; }
  double& at(int pose, int g) { return p_[static_cast<size_t>(g) * num_poses_ + pose]; }

  std::span<double> goal_column(int g) {
    return {p_.data() + static_cast<size_t>(g) * num_poses_, static_cast<size_t>(num_poses_)};
  }
  std::span<const double> goal_column(int g) const {
    return {p_.data() + static_cast<size_t>(g) * num_poses_, static_cast<size_t>(num_poses_)};
  }
  std::span<double> data() { return p_; }
  std::span<const double> data() const { return p_; }

  double total_mass() const;
  void fill(double v) { std::fill(p_.begin(), p_.end(), v); }
  void resize_like(const JointBelief& o) {
    num_poses_ = o.num_poses_;
    num_goals_ = o.num_goals_;
    p_.assign(o.p_.size(), 0.0);
  }

  bool operator==(const JointBelief&) const = default;

 private:
  int num_poses_ = 0;
  int num_goals_ = 0;
  std::vector<double> p_;
};

using GoalMarginal = std::vector<double>;

// what update() does when the observation likelihood kills all mass
enum class DegeneratePolicy {
  ResetPosesKeepGoals,  // keep pre-update goal marginal, poses uniform over
                        // observation-consistent poses (all poses as fallback)
  FullReset,            // uniform joint
  Throw,                // raise DegenerateObservation
};

struct BeliefConfig {
  // a normalizer at or below this is treated as degenerate; likelihoods here
  // are exact 0/1 indicators, so 0.0 is exact
  double renorm_floor = 0.0;
  DegeneratePolicy on_degenerate = DegeneratePolicy::ResetPosesKeepGoals;
};

// uniform over poses, goal prior uniform unless given; throws EmptyGoalSet
JointBelief init_belief(const GridMap& map, std::span<const Cell> goals,
                        std::span<const double> goal_prior = {});

// one-step motion prediction, per goal column: j'(s',g) = sum_s T_g(s,s') j(s,g)
JointBelief predict(const JointBelief& j, std::span<const TransitionMatrix> t);
void predict_into(const JointBelief& j, std::span<const TransitionMatrix> t,
                  JointBelief& out);

// Bayes update with the deterministic detection likelihood at observer pose u:
// Detected(p) keeps poses at p when p is visible; NotDetected zeroes every
// pose whose position is visible. Renormalizes, handling degeneracy per cfg.
JointBelief update(const JointBelief& predicted, const GridMap& map,
                   const AgentPose& observer, const Observation& o,
                   const BeliefConfig& cfg = {}, const FovConfig& fov = {});
void update_in_place(JointBelief& j, const GridMap& map, const AgentPose& observer,
                     const Observation& o, const BeliefConfig& cfg = {},
                     const FovConfig& fov = {});

GoalMarginal goal_marginal(const JointBelief& j);

// sum of squared goal-marginal entries, in [1/|G|, 1]
double belief_reward(const JointBelief& j);

// Shannon entropy of the pose marginal normalized by ln(pose count), in [0,1]
double actor_state_entropy(const JointBelief& j);

struct ObservationDistribution {
  std::vector<Observation> support;  // Detected(p) for visible p row-major, then NotDetected
  std::vector<double> prob;
};

// distribution of the next observation from observer pose u_next, with the
// actor pose marginal taken from predict(j, t)
ObservationDistribution observation_likelihood(const JointBelief& j,
                                               std::span<const TransitionMatrix> t,
                                               const GridMap& map,
                                               const AgentPose& observer_next,
                                               const FovConfig& fov = {});

}  // namespace agr

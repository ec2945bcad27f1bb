#include "agr/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "agr/errors.hpp"

namespace agr {

double JointBelief::total_mass() const {
  double s = 0.0;
  for (double v : p_) s += v;
  return s;
}

JointBelief init_belief(const GridMap& map, std::span<const Cell> goals,
                        std::span<const double> goal_prior) {
  if (goals.empty()) throw EmptyGoalSet("belief needs at least one candidate goal");
  if (!goal_prior.empty() && goal_prior.size() != goals.size())
    throw std::invalid_argument("goal prior size mismatch");
  const int S = map.pose_count();
  const int G = static_cast<int>(goals.size());
  JointBelief j(S, G);
  for (int g = 0; g < G; ++g) {
    double pg = goal_prior.empty() ? 1.0 / G : goal_prior[g];
    auto col = j.goal_column(g);
    double v = pg / S;
    for (int s = 0; s < S; ++s) col[s] = v;
  }
  return j;
}

void predict_into(const JointBelief& j, std::span<const TransitionMatrix> t,
                  JointBelief& out) {
  if (static_cast<int>(t.size()) != j.num_goals())
    throw std::invalid_argument("one transition matrix per goal required");
  out.resize_like(j);
  for (int g = 0; g < j.num_goals(); ++g) {
    const TransitionMatrix& tm = t[g];
    if (tm.n != j.num_poses()) throw std::invalid_argument("transition size mismatch");
    auto in = j.goal_column(g);
    auto dst = out.goal_column(g);
    for (int s = 0; s < tm.n; ++s) {
      double w = in[s];
      if (w == 0.0) continue;
      for (int32_t k = tm.offsets[s]; k < tm.offsets[s + 1]; ++k)
        dst[tm.dests[k]] += w * tm.probs[k];
    }
  }
}

JointBelief predict(const JointBelief& j, std::span<const TransitionMatrix> t) {
  JointBelief out;
  predict_into(j, t, out);
  return out;
}

namespace {

// visibility of each free cell under the fov mask
std::vector<uint8_t> free_visibility(const GridMap& map,
                                     const std::vector<uint8_t>& fov_mask) {
  std::vector<uint8_t> vis(static_cast<size_t>(map.free_cell_count()));
  for (int f = 0; f < map.free_cell_count(); ++f)
    vis[f] = fov_mask[map.cell_index(map.free_cell(f))];
  return vis;
}

// applies the 0/1 detection likelihood in place; returns surviving mass
double apply_likelihood(JointBelief& j, const GridMap& map,
                        const std::vector<uint8_t>& fov_mask, const Observation& o) {
  const int S = j.num_poses();
  const int G = j.num_goals();
  double kept = 0.0;
  if (o.is_detected()) {
    const Cell p = o.position();
    const bool visible = map.is_free(p) && fov_mask[map.cell_index(p)];
    const int lo = visible ? map.free_index(p) * kNumDirections : 0;
    const int hi = visible ? lo + kNumDirections : 0;
    for (int g = 0; g < G; ++g) {
      auto col = j.goal_column(g);
      for (int s = 0; s < S; ++s) {
        if (s >= lo && s < hi)
          kept += col[s];
        else
          col[s] = 0.0;
      }
    }
  } else {
    const auto vis = free_visibility(map, fov_mask);
    for (int g = 0; g < G; ++g) {
      auto col = j.goal_column(g);
      for (int s = 0; s < S; ++s) {
        if (vis[s / kNumDirections])
          col[s] = 0.0;
        else
          kept += col[s];
      }
    }
  }
  return kept;
}

// poses consistent with o given the fov mask, as a keep mask over pose index
std::vector<uint8_t> consistent_poses(const JointBelief& j, const GridMap& map,
                                      const std::vector<uint8_t>& fov_mask,
                                      const Observation& o) {
  const int S = j.num_poses();
  std::vector<uint8_t> keep(static_cast<size_t>(S), 0);
  if (o.is_detected()) {
    const Cell p = o.position();
    if (map.is_free(p) && fov_mask[map.cell_index(p)]) {
      int f = map.free_index(p);
      for (int h = 0; h < kNumDirections; ++h) keep[f * kNumDirections + h] = 1;
    }
  } else {
    for (int s = 0; s < S; ++s)
      if (!fov_mask[map.cell_index(map.free_cell(s / kNumDirections))]) keep[s] = 1;
  }
  return keep;
}

}  // namespace

void update_in_place(JointBelief& j, const GridMap& map, const AgentPose& observer,
                     const Observation& o, const BeliefConfig& cfg,
                     const FovConfig& fov) {
  const auto fov_mask = field_of_view_mask(map, observer, fov);
  GoalMarginal prior_goals = goal_marginal(j);
  double kept = apply_likelihood(j, map, fov_mask, o);
  if (kept > cfg.renorm_floor) {
    double inv = 1.0 / kept;
    for (double& v : j.data()) v *= inv;
    return;
  }
  switch (cfg.on_degenerate) {
    case DegeneratePolicy::Throw:
      throw DegenerateObservation("observation likelihood removed all belief mass");
    case DegeneratePolicy::FullReset: {
      double v = 1.0 / (static_cast<double>(j.num_poses()) * j.num_goals());
      j.fill(v);
      return;
    }
    case DegeneratePolicy::ResetPosesKeepGoals: {
      auto keep = consistent_poses(j, map, fov_mask, o);
      int nkeep = 0;
      for (uint8_t k : keep) nkeep += k;
      const int S = j.num_poses();
      double prior_total = 0.0;
      for (double pg : prior_goals) prior_total += pg;
      // a zero prior goal marginal means the input was already empty; fall
      // back to uniform goals so the result is a distribution
      for (int g = 0; g < j.num_goals(); ++g) {
        double pg = prior_total > 0.0 ? prior_goals[g] / prior_total : 1.0 / j.num_goals();
        auto col = j.goal_column(g);
        if (nkeep > 0) {
          for (int s = 0; s < S; ++s) col[s] = keep[s] ? pg / nkeep : 0.0;
        } else {
          for (int s = 0; s < S; ++s) col[s] = pg / S;
        }
      }
      return;
    }
  }
}

JointBelief update(const JointBelief& predicted, const GridMap& map,
                   const AgentPose& observer, const Observation& o,
                   const BeliefConfig& cfg, const FovConfig& fov) {
  JointBelief j = predicted;
  update_in_place(j, map, observer, o, cfg, fov);
  return j;
}

GoalMarginal goal_marginal(const JointBelief& j) {
  GoalMarginal m(static_cast<size_t>(j.num_goals()), 0.0);
  for (int g = 0; g < j.num_goals(); ++g) {
    double s = 0.0;
    for (double v : j.goal_column(g)) s += v;
    m[g] = s;
  }
  return m;
}

double belief_reward(const JointBelief& j) {
  double r = 0.0;
  for (int g = 0; g < j.num_goals(); ++g) {
    double s = 0.0;
    for (double v : j.goal_column(g)) s += v;
    r += s * s;
  }
  return r;
}

double actor_state_entropy(const JointBelief& j) {
  const int S = j.num_poses();
  if (S <= 1) return 0.0;
  std::vector<double> m(static_cast<size_t>(S), 0.0);
  for (int g = 0; g < j.num_goals(); ++g) {
    auto col = j.goal_column(g);
    for (int s = 0; s < S; ++s) m[s] += col[s];
  }
  double h = 0.0;
  for (double v : m)
    if (v > 0.0) h -= v * std::log(v);
  double norm = h / std::log(static_cast<double>(S));
  return std::clamp(norm, 0.0, 1.0);
}

ObservationDistribution observation_likelihood(const JointBelief& j,
                                               std::span<const TransitionMatrix> t,
                                               const GridMap& map,
                                               const AgentPose& observer_next,
                                               const FovConfig& fov) {
  JointBelief pred = predict(j, t);
  const int S = pred.num_poses();
  std::vector<double> pose_marginal(static_cast<size_t>(S), 0.0);
  for (int g = 0; g < pred.num_goals(); ++g) {
    auto col = pred.goal_column(g);
    for (int s = 0; s < S; ++s) pose_marginal[s] += col[s];
  }
  double total = 0.0;
  for (double m : pose_marginal) total += m;
  ObservationDistribution dist;
  auto visible = field_of_view(map, observer_next, fov);
  double in_fov = 0.0;
  for (Cell p : visible) {
    double m = 0.0;
    int f = map.free_index(p);
    for (int h = 0; h < kNumDirections; ++h) m += pose_marginal[f * kNumDirections + h];
    dist.support.push_back(Observation::detected(p));
    dist.prob.push_back(m);
    in_fov += m;
  }
  dist.support.push_back(Observation::not_detected());
  dist.prob.push_back(std::max(0.0, total - in_fov));
  return dist;
}

}  // namespace agr

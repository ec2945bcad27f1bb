#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agr/actor.hpp"
#include "agr/belief.hpp"
#include "agr/grid.hpp"
#include "agr/passive.hpp"
#include "agr/planner.hpp"

namespace agr {

enum class GridSize { Small, Large };
enum class DistanceLabel { Easy, Normal, Hard };

struct ExperimentConfig {
  GridSize size = GridSize::Small;
  DistanceLabel distance = DistanceLabel::Easy;

  std::string label() const;  // "S-E" .. "L-H"
  int grid_extent() const { return size == GridSize::Small ? 10 : 20; }
  // initial actor-observer BFS distance; the hard condition shrinks on S
  int start_distance() const;

  static std::optional<ExperimentConfig> parse(std::string_view label);
  static std::span<const ExperimentConfig> all();  // canonical report order
};

inline constexpr int kLayoutsPerConfig = 10;
inline constexpr int kInstancesPerLayout = 5;
inline constexpr double kObstacleDensity = 0.15;
inline constexpr int kNumGoals = 3;

struct InstanceSpec {
  ExperimentConfig config;
  int layout_index = 0;
  int instance_index = 0;
  uint64_t layout_seed = 0;
  uint64_t instance_seed = 0;
  GridMap map;
  CostMap costs;
  std::vector<Cell> goals;
  int true_goal = 0;
  AgentPose actor_start;
  AgentPose observer_start;

  std::string stem() const;  // "S-E_l03_i2", the instance file basename
};

std::vector<InstanceSpec> generate_instances(uint64_t master_seed,
                                             const ExperimentConfig& config);

struct MetricsConfig {
  double theta = 0.5;
  int t_max = 0;  // 0 selects the default cap 4*(width+height)
};

struct RunConfig {
  PlannerConfig planner;
  BeliefConfig belief;
  FovConfig fov;
  MetricsConfig metrics;
  double beta = 1.0;          // passive recognizer scaling
  bool force_joint = false;   // run the joint pipeline regardless of algorithm
  bool force_passive = false; // run the passive pipeline regardless of algorithm
};

struct StepEntry {
  int t = 0;
  AgentPose actor;
  AgentPose observer;
  std::optional<Action> action;  // absent on the terminal step
  Observation obs = Observation::not_detected();
  std::vector<double> goal_marginal;       // empty when the joint pipeline is off
  std::vector<double> passive_posterior;   // empty when the passive pipeline is off
  std::optional<PolicyDecision> decision;  // planner diagnostics, absent at T
};

struct EpisodeRecord {
  std::string config;
  uint64_t layout_seed = 0;
  uint64_t instance_seed = 0;
  std::string algo;
  int true_goal = 0;
  int horizon = 0;  // T: step index at which the actor stands on its goal
  bool hit_cap = false;
  bool scored_by_joint = true;  // benchmark pairing for the driving algorithm
  std::vector<StepEntry> steps;  // horizon + 1 entries
};

EpisodeRecord run_episode(const InstanceSpec& spec, Algorithm algo,
                          const RunConfig& cfg = {});

// b_t(g*) series used for scoring; joint selects which pipeline's series
std::vector<double> true_goal_series(const EpisodeRecord& rec, bool joint);

double convergence(const EpisodeRecord& rec, double theta);
double convergence(std::span<const double> series, int horizon, double theta);
std::pair<bool, double> success_and_final(const EpisodeRecord& rec, double theta);

struct AblationOutcome {
  double cv_joint = 0.0;
  double cv_passive = 0.0;
  EpisodeRecord record;
};

// one episode, both inference pipelines fed the identical observation stream
AblationOutcome ablation_dual_inference(const InstanceSpec& spec, Algorithm strategy,
                                        const RunConfig& cfg = {});

struct ResultRow {
  std::string config;
  uint64_t layout_seed = 0;
  uint64_t instance_seed = 0;
  std::string algo;
  double cv = 0.0;
  int sr = 0;
  double fp = 0.0;
  int horizon = 0;
  int64_t wall_ms = 0;
};

struct AblationRow {
  std::string config;
  uint64_t layout_seed = 0;
  uint64_t instance_seed = 0;
  std::string strategy;
  double cv_joint = 0.0;
  double cv_passive = 0.0;
  int horizon = 0;
  double mean_tree_depth = 0.0;  // MCTS diagnostic, 0 for other strategies
};

struct BatchOptions {
  int workers = 1;
  std::filesystem::path trace_dir;  // empty disables traces
  bool timing = false;              // off keeps wall_ms at 0 for reproducible CSVs
};

std::vector<ResultRow> run_batch(std::span<const InstanceSpec> instances, Algorithm algo,
                                 const RunConfig& cfg, const BatchOptions& opts);
std::vector<AblationRow> run_ablation_batch(std::span<const InstanceSpec> instances,
                                            Algorithm strategy, const RunConfig& cfg,
                                            const BatchOptions& opts);

struct AggregateCell {
  int count = 0;
  double cv = 0.0;
  double sr = 0.0;
  double fp = 0.0;
};

struct AggregateReport {
  // row per algorithm, column per configuration in canonical order
  std::vector<std::string> algos;
  std::array<std::string, 6> configs;
  // missing cells keep count 0 and render as absent
  std::vector<std::array<AggregateCell, 6>> cells;
};

AggregateReport aggregate_report(std::span<const ResultRow> rows);
std::string format_report_csv(const AggregateReport& rep);
std::string format_report_table(const AggregateReport& rep);

}  // namespace agr

#include "agr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "agr/errors.hpp"
#include "agr/rng.hpp"
#include "agr/serialize.hpp"

namespace agr {

std::string ExperimentConfig::label() const {
  std::string s(1, size == GridSize::Small ? 'S' : 'L');
  s += '-';
  switch (distance) {
    case DistanceLabel::Easy: s += 'E'; break;
    case DistanceLabel::Normal: s += 'N'; break;
    case DistanceLabel::Hard: s += 'H'; break;
  }
  return s;
}

int ExperimentConfig::start_distance() const {
  switch (distance) {
    case DistanceLabel::Easy: return 3;
    case DistanceLabel::Normal: return 5;
    case DistanceLabel::Hard: return size == GridSize::Small ? 7 : 10;
  }
  return 3;
}

std::optional<ExperimentConfig> ExperimentConfig::parse(std::string_view label) {
  if (label.size() != 3 || label[1] != '-') return std::nullopt;
  ExperimentConfig cfg;
  if (label[0] == 'S') cfg.size = GridSize::Small;
  else if (label[0] == 'L') cfg.size = GridSize::Large;
  else return std::nullopt;
  if (label[2] == 'E') cfg.distance = DistanceLabel::Easy;
  else if (label[2] == 'N') cfg.distance = DistanceLabel::Normal;
  else if (label[2] == 'H') cfg.distance = DistanceLabel::Hard;
  else return std::nullopt;
  return cfg;
}

std::span<const ExperimentConfig> ExperimentConfig::all() {
  static const std::array<ExperimentConfig, 6> order = {{
      {GridSize::Small, DistanceLabel::Easy},
      {GridSize::Small, DistanceLabel::Normal},
      {GridSize::Small, DistanceLabel::Hard},
      {GridSize::Large, DistanceLabel::Easy},
      {GridSize::Large, DistanceLabel::Normal},
      {GridSize::Large, DistanceLabel::Hard},
  }};
  return order;
}

std::string InstanceSpec::stem() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_l%02d_i%d", config.label().c_str(), layout_index,
                instance_index);
  return buf;
}

namespace {

bool free_cells_connected(const GridMap& map) {
  if (map.free_cell_count() == 0) return false;
  auto dist = cell_distance_field(map, map.free_cell(0));
  for (int f = 0; f < map.free_cell_count(); ++f)
    if (dist[map.cell_index(map.free_cell(f))] < 0) return false;
  return true;
}

GridMap sample_layout_map(int extent, uint64_t layout_seed) {
  const int n_cells = extent * extent;
  const int n_obstacles = static_cast<int>(kObstacleDensity * n_cells);
  for (int attempt = 0; attempt < 200; ++attempt) {
    Rng rng(derive_seed(layout_seed, 0x100 + static_cast<uint64_t>(attempt)));
    // partial Fisher-Yates over cell indices
    std::vector<int> idx(static_cast<size_t>(n_cells));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<Cell> obstacles;
    obstacles.reserve(static_cast<size_t>(n_obstacles));
    for (int k = 0; k < n_obstacles; ++k) {
      int j = k + static_cast<int>(rng.bounded(static_cast<uint64_t>(n_cells - k)));
      std::swap(idx[k], idx[j]);
      obstacles.push_back({idx[k] / extent, idx[k] % extent});
    }
    GridMap map(extent, extent, std::move(obstacles));
    if (free_cells_connected(map)) return map;
  }
  throw GenerationFailure("no connected layout found for seed");
}

// cardinal direction from observer toward the actor; row axis wins ties
Direction face_toward(Cell from, Cell to) {
  const int vr = to.r - from.r;
  const int vc = to.c - from.c;
  const int dots[kNumDirections] = {-vr, vc, vr, -vc};  // N, E, S, W
  const int pref[kNumDirections] = {0, 2, 1, 3};        // N, S, E, W
  int best = pref[0];
  for (int k = 1; k < kNumDirections; ++k)
    if (dots[pref[k]] > dots[best]) best = pref[k];
  return static_cast<Direction>(best);
}

InstanceSpec sample_instance(const ExperimentConfig& config, const GridMap& map,
                             const CostMap& costs, int layout_index, int instance_index,
                             uint64_t layout_seed, uint64_t instance_seed) {
  const int F = map.free_cell_count();
  for (int attempt = 0; attempt < 200; ++attempt) {
    Rng rng(derive_seed(instance_seed, 0x200 + static_cast<uint64_t>(attempt)));
    // distinct goal cells via partial Fisher-Yates over free indices
    std::vector<int> idx(static_cast<size_t>(F));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<Cell> goals;
    for (int k = 0; k < kNumGoals; ++k) {
      int j = k + static_cast<int>(rng.bounded(static_cast<uint64_t>(F - k)));
      std::swap(idx[k], idx[j]);
      goals.push_back(map.free_cell(idx[k]));
    }
    const int true_goal = static_cast<int>(rng.bounded(kNumGoals));

    // actor start anywhere free except the true goal (a T=0 episode breaks CV)
    Cell actor_cell = goals[true_goal];
    for (int tries = 0; tries < 100 && actor_cell == goals[true_goal]; ++tries)
      actor_cell = map.free_cell(static_cast<int>(rng.bounded(static_cast<uint64_t>(F))));
    if (actor_cell == goals[true_goal]) continue;
    const Direction actor_heading = static_cast<Direction>(rng.bounded(kNumDirections));

    // observer exactly at the labeled BFS distance, facing the actor
    const auto dist = cell_distance_field(map, actor_cell);
    std::vector<Cell> ring;
    for (int f = 0; f < F; ++f) {
      Cell p = map.free_cell(f);
      if (dist[map.cell_index(p)] == config.start_distance()) ring.push_back(p);
    }
    if (ring.empty()) continue;
    const Cell obs_cell = ring[rng.bounded(ring.size())];

    InstanceSpec spec;
    spec.config = config;
    spec.layout_index = layout_index;
    spec.instance_index = instance_index;
    spec.layout_seed = layout_seed;
    spec.instance_seed = instance_seed;
    spec.map = map;
    spec.costs = costs;
    spec.goals = std::move(goals);
    spec.true_goal = true_goal;
    spec.actor_start = {actor_cell, actor_heading};
    spec.observer_start = {obs_cell, face_toward(obs_cell, actor_cell)};
    return spec;
  }
  throw GenerationFailure("no valid instance placement found for seed");
}

}  // namespace

std::vector<InstanceSpec> generate_instances(uint64_t master_seed,
                                             const ExperimentConfig& config) {
  const uint64_t config_salt =
      static_cast<uint64_t>(config.size == GridSize::Small ? 0 : 3) +
      static_cast<uint64_t>(config.distance) + 1;
  const uint64_t seed0 = derive_seed(master_seed, config_salt);
  std::vector<InstanceSpec> out;
  out.reserve(kLayoutsPerConfig * kInstancesPerLayout);
  for (int l = 0; l < kLayoutsPerConfig; ++l) {
    const uint64_t layout_seed = derive_seed(seed0, static_cast<uint64_t>(l));
    GridMap map = sample_layout_map(config.grid_extent(), layout_seed);
    CostMap costs = generate_cost_map(map, derive_seed(layout_seed, 0xC057));
    for (int i = 0; i < kInstancesPerLayout; ++i) {
      const uint64_t instance_seed = derive_seed(layout_seed, 0x1000 + static_cast<uint64_t>(i));
      out.push_back(sample_instance(config, map, costs, l, i, layout_seed, instance_seed));
    }
  }
  return out;
}

EpisodeRecord run_episode(const InstanceSpec& spec, Algorithm algo, const RunConfig& cfg) {
  const GridMap& map = spec.map;
  const bool joint = cfg.force_joint || algorithm_uses_joint(algo);
  const bool passive = cfg.force_passive || !algorithm_uses_joint(algo);

  ActorPlan plan = plan_actor_path(map, spec.costs, spec.actor_start,
                                   spec.goals[spec.true_goal]);
  std::vector<TransitionMatrix> transitions;
  if (joint) {
    ActorModel model(map, spec.goals, cfg.planner.epsilon);
    transitions = actor_transition_matrices(model, map);
  }
  PlannerContext ctx{&map, transitions, cfg.belief, cfg.fov};
  const uint64_t episode_seed =
      derive_seed(spec.instance_seed, static_cast<uint64_t>(algo));
  auto policy = make_policy(algo, ctx, cfg.planner, episode_seed);

  EpisodeRecord rec;
  rec.config = spec.config.label();
  rec.layout_seed = spec.layout_seed;
  rec.instance_seed = spec.instance_seed;
  rec.algo = std::string(algorithm_name(algo));
  rec.true_goal = spec.true_goal;
  rec.scored_by_joint = algorithm_uses_joint(algo);

  const int t_max =
      cfg.metrics.t_max > 0 ? cfg.metrics.t_max : 4 * (map.width() + map.height());

  JointBelief j;
  if (joint) j = init_belief(map, spec.goals);
  PassiveState ps;
  if (passive) ps = passive_init(map, spec.goals, cfg.beta);

  AgentPose actor = spec.actor_start;
  AgentPose observer = spec.observer_start;
  std::vector<Observation> history;
  JointBelief pred_scratch;

  for (int t = 0;; ++t) {
    const Observation o = observe(map, observer, actor, cfg.fov);
    history.push_back(o);
    if (joint) {
      if (t > 0) {
        predict_into(j, transitions, pred_scratch);
        std::swap(j, pred_scratch);
      }
      update_in_place(j, map, observer, o, cfg.belief, cfg.fov);
    }
    if (passive) ps = passive_update(ps, o, t);

    StepEntry e;
    e.t = t;
    e.actor = actor;
    e.observer = observer;
    e.obs = o;
    if (joint) e.goal_marginal = goal_marginal(j);
    if (passive) e.passive_posterior = passive_posterior(ps);
    rec.steps.push_back(std::move(e));

    if (actor.position == spec.goals[spec.true_goal]) {
      rec.horizon = t;
      break;
    }
    if (t >= t_max) {
      rec.horizon = t;
      rec.hit_cap = true;
      break;
    }

    PolicyDecision d;
    try {
      d = policy->decide({t, observer, joint ? &j : nullptr, history});
    } catch (const Error& err) {
      throw Error(std::string(err.what()) + " [instance " + spec.stem() + ", step " +
                  std::to_string(t) + "]");
    }
    rec.steps.back().action = d.action;
    rec.steps.back().decision = d;

    observer = step_pose(map, observer, d.action, true);
    if (t < static_cast<int>(plan.actions.size()))
      actor = step_pose(map, actor, plan.actions[t], false);
  }
  return rec;
}

std::vector<double> true_goal_series(const EpisodeRecord& rec, bool joint) {
  std::vector<double> out;
  out.reserve(rec.steps.size());
  for (const StepEntry& e : rec.steps) {
    const auto& src = joint ? e.goal_marginal : e.passive_posterior;
    if (src.empty()) throw std::invalid_argument("requested inference series was not recorded");
    out.push_back(src[rec.true_goal]);
  }
  return out;
}

double convergence(std::span<const double> series, int horizon, double theta) {
  if (horizon < 1) throw std::invalid_argument("convergence needs horizon >= 1");
  if (static_cast<int>(series.size()) != horizon + 1)
    throw std::invalid_argument("series length must be horizon + 1");
  int tau = horizon + 1;
  for (int t = horizon; t >= 0; --t) {
    if (series[t] >= theta)
      tau = t;
    else
      break;
  }
  if (tau > horizon) return 0.0;
  return static_cast<double>(horizon - tau) / static_cast<double>(horizon);
}

double convergence(const EpisodeRecord& rec, double theta) {
  return convergence(true_goal_series(rec, rec.scored_by_joint), rec.horizon, theta);
}

std::pair<bool, double> success_and_final(const EpisodeRecord& rec, double theta) {
  const auto series = true_goal_series(rec, rec.scored_by_joint);
  const double fp = series.back();
  return {fp > theta, fp};
}

AblationOutcome ablation_dual_inference(const InstanceSpec& spec, Algorithm strategy,
                                        const RunConfig& cfg) {
  RunConfig both = cfg;
  both.force_joint = true;
  both.force_passive = true;
  AblationOutcome out;
  out.record = run_episode(spec, strategy, both);
  out.cv_joint =
      convergence(true_goal_series(out.record, true), out.record.horizon, cfg.metrics.theta);
  out.cv_passive =
      convergence(true_goal_series(out.record, false), out.record.horizon, cfg.metrics.theta);
  return out;
}

namespace {

// runs fn(i) over [0, n) on a small pool; first exception wins and rethrows
template <typename Fn>
void parallel_for(int workers, size_t n, Fn&& fn) {
  const int k = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (k == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto work = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(k));
  for (int w = 0; w < k; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void write_trace_file(const std::filesystem::path& dir, const EpisodeRecord& rec,
                      const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (stem + "_" + rec.algo + ".jsonl");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file: " + path.string());
  out << episode_trace_jsonl(rec);
}

}  // namespace

std::vector<ResultRow> run_batch(std::span<const InstanceSpec> instances, Algorithm algo,
                                 const RunConfig& cfg, const BatchOptions& opts) {
  std::vector<ResultRow> rows(instances.size());
  parallel_for(opts.workers, instances.size(), [&](size_t i) {
    const InstanceSpec& spec = instances[i];
    const auto t0 = std::chrono::steady_clock::now();
    EpisodeRecord rec = run_episode(spec, algo, cfg);
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    ResultRow r;
    r.config = spec.config.label();
    r.layout_seed = spec.layout_seed;
    r.instance_seed = spec.instance_seed;
    r.algo = rec.algo;
    r.cv = convergence(rec, cfg.metrics.theta);
    auto [sr, fp] = success_and_final(rec, cfg.metrics.theta);
    r.sr = sr ? 1 : 0;
    r.fp = fp;
    r.horizon = rec.horizon;
    r.wall_ms = opts.timing
                    ? std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()
                    : 0;
    if (!opts.trace_dir.empty()) write_trace_file(opts.trace_dir, rec, spec.stem());
    rows[i] = std::move(r);
  });
  return rows;
}

std::vector<AblationRow> run_ablation_batch(std::span<const InstanceSpec> instances,
                                            Algorithm strategy, const RunConfig& cfg,
                                            const BatchOptions& opts) {
  std::vector<AblationRow> rows(instances.size());
  parallel_for(opts.workers, instances.size(), [&](size_t i) {
    const InstanceSpec& spec = instances[i];
    AblationOutcome out = ablation_dual_inference(spec, strategy, cfg);
    AblationRow r;
    r.config = spec.config.label();
    r.layout_seed = spec.layout_seed;
    r.instance_seed = spec.instance_seed;
    r.strategy = out.record.algo;
    r.cv_joint = out.cv_joint;
    r.cv_passive = out.cv_passive;
    r.horizon = out.record.horizon;
    int n = 0;
    double depth_sum = 0.0;
    for (const StepEntry& e : out.record.steps) {
      if (e.decision) {
        depth_sum += e.decision->tree_depth_reached;
        ++n;
      }
    }
    r.mean_tree_depth = n > 0 ? depth_sum / n : 0.0;
    if (!opts.trace_dir.empty()) write_trace_file(opts.trace_dir, out.record, spec.stem());
    rows[i] = std::move(r);
  });
  return rows;
}

AggregateReport aggregate_report(std::span<const ResultRow> rows) {
  AggregateReport rep;
  const auto configs = ExperimentConfig::all();
  for (size_t k = 0; k < rep.configs.size(); ++k) rep.configs[k] = configs[k].label();

  auto config_col = [&](const std::string& label) -> int {
    for (size_t k = 0; k < rep.configs.size(); ++k)
      if (rep.configs[k] == label) return static_cast<int>(k);
    return -1;
  };
  auto algo_row = [&](const std::string& algo) -> int {
    for (size_t k = 0; k < rep.algos.size(); ++k)
      if (rep.algos[k] == algo) return static_cast<int>(k);
    rep.algos.push_back(algo);
    rep.cells.emplace_back();
    return static_cast<int>(rep.algos.size()) - 1;
  };
  // canonical roster order first; unknown algo strings append after
  for (Algorithm a : {Algorithm::PassiveRandom, Algorithm::SearchFollow,
                      Algorithm::BeliefGreedy, Algorithm::AgrMcts})
    for (const ResultRow& r : rows)
      if (r.algo == algorithm_name(a)) {
        algo_row(r.algo);
        break;
      }

  for (const ResultRow& r : rows) {
    const int col = config_col(r.config);
    if (col < 0) throw std::invalid_argument("unknown config label: " + r.config);
    AggregateCell& cell = rep.cells[algo_row(r.algo)][col];
    cell.count += 1;
    cell.cv += r.cv;
    cell.sr += r.sr;
    cell.fp += r.fp;
  }
  for (auto& row : rep.cells) {
    for (AggregateCell& cell : row) {
      if (cell.count > 0) {
        cell.cv /= cell.count;
        cell.sr /= cell.count;
        cell.fp /= cell.count;
      }
    }
  }
  return rep;
}

namespace {

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string format_report_csv(const AggregateReport& rep) {
  std::string out = "algo,config,count,CV,SR,FP\n";
  for (size_t a = 0; a < rep.algos.size(); ++a) {
    for (size_t c = 0; c < rep.configs.size(); ++c) {
      const AggregateCell& cell = rep.cells[a][c];
      if (cell.count == 0) continue;  // missing cells are absent, not zero
      out += rep.algos[a] + "," + rep.configs[c] + "," + std::to_string(cell.count) +
             "," + fmt3(cell.cv) + "," + fmt3(cell.sr) + "," + fmt3(cell.fp) + "\n";
    }
  }
  return out;
}

std::string format_report_table(const AggregateReport& rep) {
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-16s %-6s", "algo", "metric");
  out += buf;
  for (const auto& c : rep.configs) {
    std::snprintf(buf, sizeof buf, " %6s", c.c_str());
    out += buf;
  }
  out += "\n";
  const char* metric_names[3] = {"CV", "SR", "FP"};
  for (size_t a = 0; a < rep.algos.size(); ++a) {
    for (int m = 0; m < 3; ++m) {
      std::snprintf(buf, sizeof buf, "%-16s %-6s", m == 0 ? rep.algos[a].c_str() : "",
                    metric_names[m]);
      out += buf;
      for (size_t c = 0; c < rep.configs.size(); ++c) {
        const AggregateCell& cell = rep.cells[a][c];
        if (cell.count == 0) {
          std::snprintf(buf, sizeof buf, " %6s", "-");
        } else {
          const double v = m == 0 ? cell.cv : m == 1 ? cell.sr : cell.fp;
          std::snprintf(buf, sizeof buf, " %6.3f", v);
        }
        out += buf;
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace agr

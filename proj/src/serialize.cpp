#include "agr/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace agr {

namespace {

using nlohmann::json;

const char* direction_code(Direction d) {
  switch (d) {
    case Direction::North: return "N";
    case Direction::East: return "E";
    case Direction::South: return "S";
    case Direction::West: return "W";
  }
  return "?";
}

Direction direction_from_code(const std::string& s) {
  if (s == "N") return Direction::North;
  if (s == "E") return Direction::East;
  if (s == "S") return Direction::South;
  if (s == "W") return Direction::West;
  throw std::invalid_argument("bad direction code: " + s);
}

const char* action_code(Action a) {
  switch (a) {
    case Action::Forward: return "forward";
    case Action::TurnLeft: return "turn_left";
    case Action::TurnRight: return "turn_right";
    case Action::Stay: return "stay";
  }
  return "?";
}

json cell_json(Cell p) { return json::array({p.r, p.c}); }

Cell cell_from_json(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

json pose_json(const AgentPose& s) {
  return {{"position", cell_json(s.position)}, {"heading", direction_code(s.heading)}};
}

AgentPose pose_from_json(const json& j) {
  return {cell_from_json(j.at("position")),
          direction_from_code(j.at("heading").get<std::string>())};
}

json grid_json(const GridMap& map) {
  json obst = json::array();
  for (Cell p : map.obstacles()) obst.push_back(cell_json(p));
  return {{"width", map.width()}, {"height", map.height()}, {"obstacles", obst}};
}

GridMap grid_from_json(const json& j) {
  std::vector<Cell> obst;
  for (const auto& e : j.at("obstacles")) obst.push_back(cell_from_json(e));
  return GridMap(j.at("width").get<int>(), j.at("height").get<int>(), std::move(obst));
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  out << text;
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string instance_to_json(const InstanceSpec& spec) {
  json j;
  j["config"] = spec.config.label();
  j["layout_index"] = spec.layout_index;
  j["instance_index"] = spec.instance_index;
  j["seeds"] = {{"layout", spec.layout_seed}, {"instance", spec.instance_seed}};
  j["grid"] = grid_json(spec.map);
  j["actor_cost_map"] = spec.costs.cost_by_free;
  json goals = json::array();
  for (Cell g : spec.goals) goals.push_back(cell_json(g));
  j["goals"] = goals;
  j["true_goal"] = spec.true_goal;
  j["actor_start"] = pose_json(spec.actor_start);
  j["observer_start"] = pose_json(spec.observer_start);
  return j.dump(2) + "\n";
}

InstanceSpec instance_from_json(const std::string& text) {
  json j = json::parse(text);
  InstanceSpec spec;
  auto cfg = ExperimentConfig::parse(j.at("config").get<std::string>());
  if (!cfg) throw std::invalid_argument("bad config label in instance file");
  spec.config = *cfg;
  spec.layout_index = j.at("layout_index").get<int>();
  spec.instance_index = j.at("instance_index").get<int>();
  spec.layout_seed = j.at("seeds").at("layout").get<uint64_t>();
  spec.instance_seed = j.at("seeds").at("instance").get<uint64_t>();
  spec.map = grid_from_json(j.at("grid"));
  spec.costs.cost_by_free = j.at("actor_cost_map").get<std::vector<int>>();
  if (static_cast<int>(spec.costs.cost_by_free.size()) != spec.map.free_cell_count())
    throw std::invalid_argument("cost map size does not match grid free cells");
  for (const auto& e : j.at("goals")) spec.goals.push_back(cell_from_json(e));
  spec.true_goal = j.at("true_goal").get<int>();
  if (spec.true_goal < 0 || spec.true_goal >= static_cast<int>(spec.goals.size()))
    throw std::invalid_argument("true_goal out of range");
  spec.actor_start = pose_from_json(j.at("actor_start"));
  spec.observer_start = pose_from_json(j.at("observer_start"));
  return spec;
}

void write_instances(const std::filesystem::path& dir,
                     std::span<const InstanceSpec> specs) {
  std::filesystem::create_directories(dir);
  for (const InstanceSpec& spec : specs)
    write_text_file(dir / (spec.stem() + ".json"), instance_to_json(spec));
}

InstanceSpec load_instance(const std::filesystem::path& file) {
  return instance_from_json(read_text_file(file));
}

std::vector<InstanceSpec> load_instances(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<InstanceSpec> specs;
  specs.reserve(files.size());
  for (const auto& f : files) specs.push_back(load_instance(f));
  return specs;
}

std::string episode_trace_jsonl(const EpisodeRecord& rec) {
  std::string out;
  json meta;
  meta["config"] = rec.config;
  meta["layout_seed"] = rec.layout_seed;
  meta["instance_seed"] = rec.instance_seed;
  meta["algo"] = rec.algo;
  meta["true_goal"] = rec.true_goal;
  meta["horizon"] = rec.horizon;
  meta["hit_cap"] = rec.hit_cap;
  meta["scored_by_joint"] = rec.scored_by_joint;
  out += meta.dump() + "\n";
  for (const StepEntry& e : rec.steps) {
    json s;
    s["t"] = e.t;
    s["actor"] = pose_json(e.actor);
    s["observer"] = pose_json(e.observer);
    if (e.obs.is_detected())
      s["obs"] = {{"detected", true}, {"position", cell_json(e.obs.position())}};
    else
      s["obs"] = {{"detected", false}};
    if (e.action) s["action"] = action_code(*e.action);
    if (!e.goal_marginal.empty()) s["goal_marginal"] = e.goal_marginal;
    if (!e.passive_posterior.empty()) s["passive_posterior"] = e.passive_posterior;
    if (e.decision) {
      json d;
      d["action"] = action_code(e.decision->action);
      d["q_estimates"] = e.decision->q_estimates;
      d["visits"] = e.decision->visit_counts;
      d["tree_depth_reached"] = e.decision->tree_depth_reached;
      s["decision"] = d;
    }
    out += s.dump() + "\n";
  }
  return out;
}

void write_results_csv(const std::filesystem::path& file,
                       std::span<const ResultRow> rows) {
  std::string out = "config,layout_seed,instance_seed,algo,CV,SR,FP,T,wall_ms\n";
  for (const ResultRow& r : rows) {
    out += r.config + "," + std::to_string(r.layout_seed) + "," +
           std::to_string(r.instance_seed) + "," + r.algo + "," + fixed6(r.cv) + "," +
           std::to_string(r.sr) + "," + fixed6(r.fp) + "," + std::to_string(r.horizon) +
           "," + std::to_string(r.wall_ms) + "\n";
  }
  write_text_file(file, out);
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& file) {
  std::istringstream in(read_text_file(file));
  std::string line;
  std::vector<ResultRow> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 9) throw std::invalid_argument("bad results row: " + line);
    ResultRow r;
    r.config = f[0];
    r.layout_seed = std::stoull(f[1]);
    r.instance_seed = std::stoull(f[2]);
    r.algo = f[3];
    r.cv = std::stod(f[4]);
    r.sr = std::stoi(f[5]);
    r.fp = std::stod(f[6]);
    r.horizon = std::stoi(f[7]);
    r.wall_ms = std::stoll(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_ablation_csv(const std::filesystem::path& file,
                        std::span<const AblationRow> rows) {
  std::string out = "config,layout_seed,instance_seed,strategy,CV_joint,CV_passive,T\n";
  for (const AblationRow& r : rows) {
    out += r.config + "," + std::to_string(r.layout_seed) + "," +
           std::to_string(r.instance_seed) + "," + r.strategy + "," +
           fixed6(r.cv_joint) + "," + fixed6(r.cv_passive) + "," +
           std::to_string(r.horizon) + "\n";
  }
  write_text_file(file, out);
}

std::vector<AblationRow> read_ablation_csv(const std::filesystem::path& file) {
  std::istringstream in(read_text_file(file));
  std::string line;
  std::vector<AblationRow> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 7) throw std::invalid_argument("bad ablation row: " + line);
    AblationRow r;
    r.config = f[0];
    r.layout_seed = std::stoull(f[1]);
    r.instance_seed = std::stoull(f[2]);
    r.strategy = f[3];
    r.cv_joint = std::stod(f[4]);
    r.cv_passive = std::stod(f[5]);
    r.horizon = std::stoi(f[6]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace agr

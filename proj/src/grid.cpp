#include "agr/grid.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace agr {

GridMap::GridMap(int width, int height, std::vector<Cell> obstacles)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("grid dimensions must be positive");
  obstacle_.assign(static_cast<size_t>(width * height), 0);
  for (const Cell& p : obstacles) {
    if (!in_bounds(p)) throw std::invalid_argument("obstacle out of bounds");
    obstacle_[cell_index(p)] = 1;
  }
  free_index_.assign(static_cast<size_t>(width * height), -1);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      Cell p{r, c};
      if (obstacle_[cell_index(p)]) {
        obstacles_.push_back(p);
      } else {
        free_index_[cell_index(p)] = static_cast<int>(free_cells_.size());
        free_cells_.push_back(p);
      }
    }
  }
}

AgentPose step_pose(const GridMap& map, const AgentPose& pose, Action a,
                    bool traverses_obstacles) {
  switch (a) {
    case Action::Forward: {
      Cell d = direction_delta(pose.heading);
      Cell target{pose.position.r + d.r, pose.position.c + d.c};
      if (map.in_bounds(target) && (traverses_obstacles || !map.is_obstacle(target)))
        return {target, pose.heading};
      return pose;
    }
    case Action::TurnLeft:
      return {pose.position, turn_left(pose.heading)};
    case Action::TurnRight:
      return {pose.position, turn_right(pose.heading)};
    case Action::Stay:
      return pose;
  }
  return pose;
}

bool line_of_sight(const GridMap& map, Cell from, Cell to) {
  // standard all-quadrant Bresenham; ties step diagonally
  int x = from.c, y = from.r;
  const int x1 = to.c, y1 = to.r;
  const int dx = std::abs(x1 - x), sx = x < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y), sy = y < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if ((x != from.c || y != from.r) && (x != x1 || y != y1) &&
        map.is_obstacle({y, x}))
      return false;
    if (x == x1 && y == y1) return true;
    int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

std::vector<int> cell_distance_field(const GridMap& map, Cell source) {
  std::vector<int> dist(static_cast<size_t>(map.cell_count()), -1);
  if (!map.is_free(source)) return dist;
  std::vector<Cell> frontier{source};
  dist[map.cell_index(source)] = 0;
  while (!frontier.empty()) {
    std::vector<Cell> next;
    for (Cell p : frontier) {
      int d = dist[map.cell_index(p)];
      const Cell nbrs[4] = {{p.r - 1, p.c}, {p.r, p.c + 1}, {p.r + 1, p.c}, {p.r, p.c - 1}};
      for (Cell q : nbrs) {
        if (map.is_free(q) && dist[map.cell_index(q)] < 0) {
          dist[map.cell_index(q)] = d + 1;
          next.push_back(q);
        }
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

namespace {

// visits the in-bounds cells of the local viewing window
template <typename F>
void for_each_window_cell(const GridMap& map, const AgentPose& obs,
                          const FovConfig& cfg, F&& fn) {
  const Cell fwd = direction_delta(obs.heading);
  const Cell lat = direction_delta(turn_right(obs.heading));
  for (int a = cfg.forward_offset; a < cfg.forward_offset + cfg.depth; ++a) {
    for (int b = -cfg.half_width; b <= cfg.half_width; ++b) {
      Cell p{obs.position.r + a * fwd.r + b * lat.r,
             obs.position.c + a * fwd.c + b * lat.c};
      if (map.in_bounds(p)) fn(p);
    }
  }
}

}  // namespace

std::vector<Cell> field_of_view(const GridMap& map, const AgentPose& observer,
                                const FovConfig& cfg) {
  std::vector<Cell> out;
  for_each_window_cell(map, observer, cfg, [&](Cell p) {
    if (!map.is_obstacle(p) && line_of_sight(map, observer.position, p))
      out.push_back(p);
  });
  std::sort(out.begin(), out.end(), cell_less);
  return out;
}

std::vector<uint8_t> field_of_view_mask(const GridMap& map, const AgentPose& observer,
                                        const FovConfig& cfg) {
  std::vector<uint8_t> mask(static_cast<size_t>(map.cell_count()), 0);
  for_each_window_cell(map, observer, cfg, [&](Cell p) {
    if (!map.is_obstacle(p) && line_of_sight(map, observer.position, p))
      mask[map.cell_index(p)] = 1;
  });
  return mask;
}

Observation observe(const GridMap& map, const AgentPose& observer,
                    const AgentPose& actor, const FovConfig& cfg) {
  const Cell target = actor.position;
  bool visible = false;
  for_each_window_cell(map, observer, cfg, [&](Cell p) {
    if (p == target && !map.is_obstacle(p) &&
        line_of_sight(map, observer.position, p))
      visible = true;
  });
  return visible ? Observation::detected(target) : Observation::not_detected();
}

}  // namespace agr

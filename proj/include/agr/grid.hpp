#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace agr {

struct Cell {
  int r = 0;
  int c = 0;
  bool operator==(const Cell&) const = default;
};

// row-major rank, the fixed tie-break order for anything cell-valued
constexpr bool cell_less(Cell a, Cell b) {
  return a.r != b.r ? a.r < b.r : a.c < b.c;
}

enum class Direction : uint8_t { North = 0, East = 1, South = 2, West = 3 };

// fixed action order; doubles as the tie-break order everywhere
enum class Action : uint8_t { Forward = 0, TurnLeft = 1, TurnRight = 2, Stay = 3 };

inline constexpr int kNumActions = 4;
inline constexpr int kNumDirections = 4;

constexpr Direction turn_left(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 3) % 4);
}

constexpr Direction turn_right(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 1) % 4);
}

// North decreases the row index, East increases the column index
constexpr Cell direction_delta(Direction d) {
  switch (d) {
    case Direction::North: return {-1, 0};
    case Direction::East: return {0, 1};
    case Direction::South: return {1, 0};
    case Direction::West: return {0, -1};
  }
  return {0, 0};
}

struct AgentPose {
  Cell position;
  Direction heading = Direction::North;
  bool operator==(const AgentPose&) const = default;
};

// A detection reveals the actor's position, never its heading.
class Observation {
 public:
  static Observation detected(Cell p) { return Observation(true, p); }
  static Observation not_detected() { return Observation(); }

  bool is_detected() const { return detected_; }
  Cell position() const { return position_; }  // meaningful only when detected
  bool operator==(const Observation&) const = default;

 private:
  Observation() = default;
  Observation(bool d, Cell p) : detected_(d), position_(p) {}
  bool detected_ = false;
  Cell position_{0, 0};
};

// Rectangular grid with static obstacles. Free cells are indexed row-major
// (the canonical enumeration order); poses are free cells crossed with the
// four headings, heading-minor.
class GridMap {
 public:
  GridMap() = default;
  GridMap(int width, int height, std::vector<Cell> obstacles);

  int width() const { return width_; }
  int height() const { return height_; }
  int cell_count() const { return width_ * height_; }

  bool in_bounds(Cell p) const {
    return p.r >= 0 && p.r < height_ && p.c >= 0 && p.c < width_;
  }
  bool is_obstacle(Cell p) const { return obstacle_[cell_index(p)]; }
  bool is_free(Cell p) const { return in_bounds(p) && !obstacle_[cell_index(p)]; }

  int cell_index(Cell p) const { return p.r * width_ + p.c; }
  Cell cell_at(int idx) const { return {idx / width_, idx % width_}; }

  int free_cell_count() const { return static_cast<int>(free_cells_.size()); }
  // -1 when out of bounds or an obstacle
  int free_index(Cell p) const { return in_bounds(p) ? free_index_[cell_index(p)] : -1; }
  Cell free_cell(int idx) const { return free_cells_[idx]; }

  int pose_count() const { return kNumDirections * free_cell_count(); }
  int pose_index(const AgentPose& s) const {
    int f = free_index(s.position);
    return f < 0 ? -1 : f * kNumDirections + static_cast<int>(s.heading);
  }
  AgentPose pose_at(int idx) const {
    return {free_cells_[idx / kNumDirections],
            static_cast<Direction>(idx % kNumDirections)};
  }

  // sorted row-major
  const std::vector<Cell>& obstacles() const { return obstacles_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> obstacle_;
  std::vector<int> free_index_;
  std::vector<Cell> free_cells_;
  std::vector<Cell> obstacles_;
};

// Forward moves one cell along the heading unless that would leave the grid
// or (for agents that cannot traverse obstacles) enter an obstacle; blocked
// Forward is a no-op. Turns rotate in place, Stay does nothing.
AgentPose step_pose(const GridMap& map, const AgentPose& pose, Action a,
                    bool traverses_obstacles);

// true when every strictly intermediate cell of the Bresenham line from
// `from` to `to` is obstacle-free; endpoints never block
bool line_of_sight(const GridMap& map, Cell from, Cell to);

// 4-neighbor BFS step counts from source over free cells, keyed by
// cell_index; -1 marks obstacles and unreachable cells
std::vector<int> cell_distance_field(const GridMap& map, Cell source);

// Viewing window in the observer's local frame: depth rows along the heading
// starting at forward_offset (0 keeps the observer's own row), half_width
// cells to each side. Defaults give the 5x5 window with the observer at the
// center of its near edge.
struct FovConfig {
  int depth = 5;
  int half_width = 2;
  int forward_offset = 0;
};

// visible cells, sorted row-major; obstacle cells are never visible and an
// obstacle on the sight line hides everything behind it
std::vector<Cell> field_of_view(const GridMap& map, const AgentPose& observer,
                                const FovConfig& cfg = {});

// same predicate as a dense mask over cell_index, for hot paths
std::vector<uint8_t> field_of_view_mask(const GridMap& map, const AgentPose& observer,
                                        const FovConfig& cfg = {});

Observation observe(const GridMap& map, const AgentPose& observer,
                    const AgentPose& actor, const FovConfig& cfg = {});

}  // namespace agr

template <>
struct std::hash<agr::Cell> {
  size_t operator()(const agr::Cell& p) const {
    return std::hash<uint64_t>()((static_cast<uint64_t>(static_cast<uint32_t>(p.r)) << 32) |
                                 static_cast<uint32_t>(p.c));
  }
};

template <>
struct std::hash<agr::AgentPose> {
  size_t operator()(const agr::AgentPose& s) const {
    return std::hash<agr::Cell>()(s.position) * 31 + static_cast<size_t>(s.heading);
  }
};

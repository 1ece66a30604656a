#pragma once

#include <optional>
#include <vector>

#include "cellplan/trajectory.hpp"
#include "cellplan/world.hpp"

namespace cellplan {

// Incremental lifelong replanner over an 8-connected 2-D grid. Moves cost 1
// axially and sqrt(2) diagonally; a diagonal move needs both adjacent axial
// cells free. The solver keeps its own blocked-cell view, seeded from the
// world's known state at construction and updated through notify_blocked.
class DStarLite {
 public:
  DStarLite(const OccupancyWorld& w, GridCell start, GridCell goal);

  // Repairs the solution after start moves or edge costs change. Returns
  // false when no finite-cost path to the goal remains.
  bool compute();

  // Greedy walk over the computed g-values, start cell first. Empty when the
  // goal is unreachable.
  std::vector<GridCell> extract_path() const;

  void move_start(GridCell new_start);
  void notify_blocked(GridCell cell);

  bool blocked(GridCell c) const { return blocked_[index(c)] != 0; }
  long expansions() const { return expansions_; }
  GridCell start() const { return start_; }
  GridCell goal() const { return goal_; }

  // Canonical cost of a grid path: axial steps + sqrt(2) * diagonal steps.
  static double path_cost(const std::vector<GridCell>& path);

 private:
  struct Key {
    double k1;
    double k2;
    bool operator<(const Key& o) const {
      if (k1 != o.k1) return k1 < o.k1;
      return k2 < o.k2;
    }
  };

  int rows_, cols_;
  GridCell start_, goal_, last_;
  double km_ = 0.0;
  long expansions_ = 0;
  std::vector<std::uint8_t> blocked_;
  std::vector<double> g_, rhs_;
  std::vector<long> queued_version_;

  struct Entry {
    Key key;
    long version;
    int cell;
  };
  std::vector<Entry> heap_;

  std::size_t index(GridCell c) const {
    return static_cast<std::size_t>(c.row) * cols_ + c.col;
  }
  GridCell cell_of(int idx) const { return {idx / cols_, idx % cols_}; }
  bool in_grid(GridCell c) const {
    return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_;
  }

  double heuristic(GridCell a, GridCell b) const;
  double edge_cost(GridCell a, GridCell b) const;
  Key calc_key(GridCell c) const;
  void push(GridCell c, Key k);
  void update_vertex(GridCell c);
  void pop_stale();
};

// One-shot optimal cost on the same grid and cost structure (known view),
// as an independent yardstick. Nullopt when unreachable.
std::optional<double> dijkstra_oracle(const OccupancyWorld& w, GridCell start,
                                      GridCell goal);

// Full planner run; a sensor makes it operate semi-known, revealing at each
// executed cell and repairing incrementally.
PlanResult dstar_lite_plan(OccupancyWorld& w, GridCell start, GridCell goal,
                           const std::optional<SensorConfig>& sensor =
                               std::nullopt,
                           int max_moves = 200000);

}  // namespace cellplan

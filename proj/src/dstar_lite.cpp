#include "cellplan/dstar_lite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>

namespace cellplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730951;

const int kNeighborOffsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                    {0, 1},   {1, -1}, {1, 0},  {1, 1}};

}  // namespace

DStarLite::DStarLite(const OccupancyWorld& w, GridCell start, GridCell goal)
    : rows_(w.rows()), cols_(w.cols()), start_(start), goal_(goal),
      last_(start) {
  if (w.dimensionality() != 2)
    throw std::invalid_argument("DStarLite requires a 2-D grid world");
  if (!in_grid(start) || !in_grid(goal))
    throw std::invalid_argument("start and goal must lie inside the grid");
  const std::size_t n = static_cast<std::size_t>(rows_) * cols_;
  blocked_.assign(n, 0);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if (w.cell_occupied({r, c}, ObstacleView::Known)) blocked_[index({r, c})] = 1;
  g_.assign(n, kInf);
  rhs_.assign(n, kInf);
  queued_version_.assign(n, 0);
  rhs_[index(goal_)] = 0.0;
  push(goal_, calc_key(goal_));
}

double DStarLite::heuristic(GridCell a, GridCell b) const {
  const double dr = std::abs(a.row - b.row);
  const double dc = std::abs(a.col - b.col);
  return std::max(dr, dc) + (kSqrt2 - 1.0) * std::min(dr, dc);
}

double DStarLite::edge_cost(GridCell a, GridCell b) const {
  if (!in_grid(a) || !in_grid(b)) return kInf;
  if (blocked_[index(a)] || blocked_[index(b)]) return kInf;
  const int dr = b.row - a.row;
  const int dc = b.col - a.col;
  if (dr != 0 && dc != 0) {
    // No cutting corners: both axial companions must be free.
    const GridCell c1{a.row + dr, a.col};
    const GridCell c2{a.row, a.col + dc};
    if (!in_grid(c1) || !in_grid(c2)) return kInf;
    if (blocked_[index(c1)] || blocked_[index(c2)]) return kInf;
    return kSqrt2;
  }
  return 1.0;
}

DStarLite::Key DStarLite::calc_key(GridCell c) const {
  const double m = std::min(g_[index(c)], rhs_[index(c)]);
  return {m + heuristic(start_, c) + km_, m};
}

void DStarLite::push(GridCell c, Key k) {
  const long v = ++queued_version_[index(c)];
  heap_.push_back({k, v, static_cast<int>(index(c))});
  std::push_heap(heap_.begin(), heap_.end(), [](const Entry& a, const Entry& b) {
    if (b.key < a.key) return true;
    if (a.key < b.key) return false;
    if (a.cell != b.cell) return a.cell > b.cell;
    return a.version > b.version;
  });
}

void DStarLite::pop_stale() {
  auto cmp = [](const Entry& a, const Entry& b) {
    if (b.key < a.key) return true;
    if (a.key < b.key) return false;
    if (a.cell != b.cell) return a.cell > b.cell;
    return a.version > b.version;
  };
  while (!heap_.empty() &&
         heap_.front().version != queued_version_[heap_.front().cell]) {
    std::pop_heap(heap_.begin(), heap_.end(), cmp);
    heap_.pop_back();
  }
}

void DStarLite::update_vertex(GridCell c) {
  const std::size_t i = index(c);
  if (!(c == goal_)) {
    double best = kInf;
    for (const auto& off : kNeighborOffsets) {
      const GridCell nb{c.row + off[0], c.col + off[1]};
      if (!in_grid(nb)) continue;
      const double cost = edge_cost(c, nb);
      if (cost == kInf) continue;
      best = std::min(best, cost + g_[index(nb)]);
    }
    rhs_[i] = best;
  }
  ++queued_version_[i];  // drop any queued entry
  if (g_[i] != rhs_[i]) push(c, calc_key(c));
}

bool DStarLite::compute() {
  auto cmp = [](const Entry& a, const Entry& b) {
    if (b.key < a.key) return true;
    if (a.key < b.key) return false;
    if (a.cell != b.cell) return a.cell > b.cell;
    return a.version > b.version;
  };
  const std::size_t si = index(start_);
  while (true) {
    pop_stale();
    if (heap_.empty()) break;
    const Key top = heap_.front().key;
    const Key start_key = calc_key(start_);
    if (!(top < start_key) && rhs_[si] == g_[si]) break;

    const int cell_idx = heap_.front().cell;
    const GridCell u = cell_of(cell_idx);
    std::pop_heap(heap_.begin(), heap_.end(), cmp);
    heap_.pop_back();
    ++queued_version_[cell_idx];

    const Key k_new = calc_key(u);
    if (top < k_new) {
      push(u, k_new);
      continue;
    }
    ++expansions_;
    if (g_[cell_idx] > rhs_[cell_idx]) {
      g_[cell_idx] = rhs_[cell_idx];
    } else {
      g_[cell_idx] = kInf;
      update_vertex(u);
    }
    for (const auto& off : kNeighborOffsets) {
      const GridCell nb{u.row + off[0], u.col + off[1]};
      if (in_grid(nb)) update_vertex(nb);
    }
  }
  return g_[si] < kInf;
}

std::vector<GridCell> DStarLite::extract_path() const {
  std::vector<GridCell> path;
  if (g_[index(start_)] == kInf) return path;
  GridCell cur = start_;
  const long limit = static_cast<long>(rows_) * cols_ + 1;
  for (long i = 0; i < limit; ++i) {
    path.push_back(cur);
    if (cur == goal_) return path;
    GridCell best{};
    double best_cost = kInf;
    for (const auto& off : kNeighborOffsets) {
      const GridCell nb{cur.row + off[0], cur.col + off[1]};
      if (!in_grid(nb)) continue;
      const double cost = edge_cost(cur, nb);
      if (cost == kInf) continue;
      const double through = cost + g_[index(nb)];
      if (through < best_cost) {
        best_cost = through;
        best = nb;
      }
    }
    if (best_cost == kInf) return {};
    cur = best;
  }
  return {};
}

void DStarLite::move_start(GridCell new_start) {
  if (!in_grid(new_start))
    throw std::invalid_argument("move_start: outside the grid");
  km_ += heuristic(last_, new_start);
  last_ = new_start;
  start_ = new_start;
}

void DStarLite::notify_blocked(GridCell cell) {
  if (!in_grid(cell)) return;
  if (blocked_[index(cell)]) return;
  blocked_[index(cell)] = 1;
  update_vertex(cell);
  for (const auto& off : kNeighborOffsets) {
    const GridCell nb{cell.row + off[0], cell.col + off[1]};
    if (in_grid(nb)) update_vertex(nb);
  }
}

double DStarLite::path_cost(const std::vector<GridCell>& path) {
  long axial = 0, diagonal = 0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const int dr = std::abs(path[i].row - path[i - 1].row);
    const int dc = std::abs(path[i].col - path[i - 1].col);
    if (dr + dc == 1)
      ++axial;
    else if (dr == 1 && dc == 1)
      ++diagonal;
    else
      throw std::invalid_argument("path_cost: non-adjacent consecutive cells");
  }
  return static_cast<double>(axial) + static_cast<double>(diagonal) * kSqrt2;
}

std::optional<double> dijkstra_oracle(const OccupancyWorld& w, GridCell start,
                                      GridCell goal) {
  if (w.dimensionality() != 2)
    throw std::invalid_argument("dijkstra_oracle requires a 2-D grid world");
  const int rows = w.rows(), cols = w.cols();
  auto in_grid = [&](GridCell c) {
    return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols;
  };
  if (!in_grid(start) || !in_grid(goal)) return std::nullopt;
  auto blocked = [&](GridCell c) {
    return w.cell_occupied(c, ObstacleView::Known);
  };
  if (blocked(start) || blocked(goal)) return std::nullopt;

  auto index = [&](GridCell c) {
    return static_cast<std::size_t>(c.row) * cols + c.col;
  };
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  std::vector<double> dist(n, kInf);
  std::vector<long> ax(n, 0), di(n, 0);
  std::vector<std::uint8_t> done(n, 0);

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[index(start)] = 0.0;
  heap.push({0.0, index(start)});

  while (!heap.empty()) {
    const auto [d, ui] = heap.top();
    heap.pop();
    if (done[ui]) continue;
    done[ui] = 1;
    const GridCell u{static_cast<int>(ui) / cols, static_cast<int>(ui) % cols};
    if (u == goal) break;
    for (const auto& off : kNeighborOffsets) {
      const GridCell nb{u.row + off[0], u.col + off[1]};
      if (!in_grid(nb) || blocked(nb)) continue;
      const bool diag = off[0] != 0 && off[1] != 0;
      if (diag) {
        if (blocked({u.row + off[0], u.col}) || blocked({u.row, u.col + off[1]}))
          continue;
      }
      const double cost = diag ? kSqrt2 : 1.0;
      const std::size_t vi = index(nb);
      if (d + cost < dist[vi]) {
        dist[vi] = d + cost;
        ax[vi] = ax[ui] + (diag ? 0 : 1);
        di[vi] = di[ui] + (diag ? 1 : 0);
        heap.push({dist[vi], vi});
      }
    }
  }
  const std::size_t gi = index(goal);
  if (dist[gi] == kInf) return std::nullopt;
  return static_cast<double>(ax[gi]) + static_cast<double>(di[gi]) * kSqrt2;
}

PlanResult dstar_lite_plan(OccupancyWorld& w, GridCell start, GridCell goal,
                           const std::optional<SensorConfig>& sensor,
                           int max_moves) {
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult result;
  result.trajectory.start = w.cell_center(start);
  RunMetrics& m = result.metrics;

  if (!w.cell_in_grid(start) || !w.cell_in_grid(goal))
    throw std::invalid_argument("start and goal must lie inside the grid");

  std::vector<GridCell> walked{start};
  auto finish = [&](Outcome o) {
    m.outcome = o;
    m.path_cost = DStarLite::path_cost(walked);
    m.path_length_m = result.trajectory.length();
    m.path_nodes = static_cast<long>(walked.size());
    m.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return result;
  };

  if (start == goal) return finish(Outcome::Success);

  DStarLite solver(w, start, goal);
  long expanded_before = 0;
  auto run_compute = [&]() {
    const bool ok = solver.compute();
    ++m.steps;
    m.nodes_per_step.push_back(solver.expansions() - expanded_before);
    m.nodes_total = solver.expansions();
    expanded_before = solver.expansions();
    return ok;
  };

  if (!sensor) {
    if (!run_compute()) return finish(Outcome::Unreachable);
    const std::vector<GridCell> path = solver.extract_path();
    if (path.empty()) return finish(Outcome::Unreachable);
    for (std::size_t i = 1; i < path.size(); ++i) {
      walked.push_back(path[i]);
      result.trajectory.points.push_back(w.cell_center(path[i]));
    }
    return finish(Outcome::Success);
  }

  // Semi-known: reveal, repair, take one step, repeat.
  GridCell cur = start;
  std::vector<GridCell> newly;
  w.reveal_sphere(w.cell_center(cur), sensor->range, &newly);
  for (GridCell c : newly) solver.notify_blocked(c);
  if (!run_compute()) return finish(Outcome::Unreachable);

  for (int move = 0; move < max_moves; ++move) {
    const std::vector<GridCell> path = solver.extract_path();
    if (path.size() < 2) return finish(Outcome::Unreachable);
    cur = path[1];
    walked.push_back(cur);
    result.trajectory.points.push_back(w.cell_center(cur));
    if (cur == goal) return finish(Outcome::Success);

    newly.clear();
    w.reveal_sphere(w.cell_center(cur), sensor->range, &newly);
    solver.move_start(cur);
    for (GridCell c : newly) solver.notify_blocked(c);
    if (!run_compute()) return finish(Outcome::Unreachable);
  }
  m.detail = "move limit exhausted at " + std::to_string(max_moves);
  return finish(Outcome::Timeout);
}

}  // namespace cellplan

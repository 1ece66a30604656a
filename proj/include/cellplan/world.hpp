#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cellplan/geometry.hpp"

namespace cellplan {

// Parse or validation failure in any of the text formats.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SensorConfig {
  double range = 5.0;  // omnidirectional reveal radius, meters
};

struct GridCell {
  int row = 0;
  int col = 0;
};

inline bool operator==(GridCell a, GridCell b) {
  return a.row == b.row && a.col == b.col;
}
inline bool operator!=(GridCell a, GridCell b) { return !(a == b); }

// Which obstacle set a query consults: planners see what has been revealed
// (everything, in fully-known mode), audits see the ground truth.
enum class ObstacleView { Known, Truth };

// Occupancy map over either a 2-D cell grid (character maps) or a 3-D point
// set (obstacle clouds). Obstacles are inflated by a fixed radius; queries
// outside the world bounds count as occupied. In semi-known mode the world
// starts unknown and obstacles become known only through reveal().
class OccupancyWorld {
 public:
  struct Config {
    double resolution = 1.0;
    double inflation_radius = 0.5;
    bool semi_known = false;
    // 3-D worlds only; defaults to the point bounding box padded by 25 m.
    std::optional<std::pair<Point3, Point3>> bounds;
  };

  static OccupancyWorld make_grid2d(int rows, int cols, const Config& cfg);
  static OccupancyWorld make_points3d(std::vector<Point3> points,
                                      const Config& cfg);

  int dimensionality() const { return dim_; }
  double resolution() const { return resolution_; }
  double inflation_radius() const { return inflation_; }
  bool semi_known() const { return semi_known_; }
  Point3 bounds_min() const { return bmin_; }
  Point3 bounds_max() const { return bmax_; }
  bool in_bounds(const Point3& p) const;

  // 2-D grid access.
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  void set_cell(GridCell c, bool occupied);  // edits the true world
  bool cell_occupied(GridCell c, ObstacleView view = ObstacleView::Known) const;
  bool cell_in_grid(GridCell c) const {
    return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_;
  }
  GridCell cell_at(const Point3& p) const;
  Point3 cell_center(GridCell c) const;

  // 3-D point access.
  const std::vector<Point3>& points() const { return points_; }
  bool point_known(std::size_t i) const { return known_pts_[i] != 0; }

  std::size_t true_count() const;
  std::size_t known_count() const;

  // Point occupancy under inflation; out of bounds is occupied.
  bool occupied(const Point3& p, ObstacleView view = ObstacleView::Known) const;

  // Marks true obstacles within range of center as known. Returns how many
  // became known; optionally reports newly known 2-D cells.
  int reveal_sphere(const Point3& center, double range,
                    std::vector<GridCell>* newly_known = nullptr);

 private:
  int dim_ = 2;
  double resolution_ = 1.0;
  double inflation_ = 0.5;
  bool semi_known_ = false;
  Point3 bmin_, bmax_;

  int rows_ = 0, cols_ = 0;
  std::vector<std::uint8_t> true_grid_;
  std::vector<std::uint8_t> known_grid_;

  std::vector<Point3> points_;
  std::vector<std::uint8_t> known_pts_;

  std::size_t idx(GridCell c) const {
    return static_cast<std::size_t>(c.row) * cols_ + c.col;
  }
};

// --- loading and saving ---

OccupancyWorld load_map_2d(const std::string& text,
                           const OccupancyWorld::Config& cfg = {});
OccupancyWorld load_map_2d_file(const std::string& path,
                                const OccupancyWorld::Config& cfg = {});
OccupancyWorld load_obstacles_3d(std::vector<Point3> pts,
                                 const OccupancyWorld::Config& cfg = {});
OccupancyWorld load_obstacles_3d_csv(const std::string& text,
                                     const OccupancyWorld::Config& cfg = {});
OccupancyWorld load_obstacles_3d_csv_file(const std::string& path,
                                          const OccupancyWorld::Config& cfg = {});
std::string save_map_2d(const OccupancyWorld& w);
std::string save_obstacles_3d_csv(const OccupancyWorld& w);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Shortest round-trip decimal form of v.
std::string format_double(double v);

// --- queries ---

inline bool is_occupied(const OccupancyWorld& w, const Point3& p) {
  return w.occupied(p, ObstacleView::Known);
}

// True when every sample along [a, b] at resolution/2 spacing is free.
bool segment_clear(const OccupancyWorld& w, const Point3& a, const Point3& b,
                   ObstacleView view = ObstacleView::Known);

// Arc length from `from` along the polyline to the first occupied sample,
// or nullopt if the whole path is clear. Sampling stops early once the
// accumulated arc length exceeds max_dist.
std::optional<double> nearest_obstacle_on_path(
    const OccupancyWorld& w, std::span<const Point3> path, const Point3& from,
    double max_dist = std::numeric_limits<double>::infinity());

inline int reveal(OccupancyWorld& w, const Point3& p,
                  const SensorConfig& sensor) {
  return w.reveal_sphere(p, sensor.range);
}

// Known obstacle positions: revealed points in 3-D, known cell centers in 2-D.
std::vector<Point3> known_obstacle_points(const OccupancyWorld& w);

}  // namespace cellplan

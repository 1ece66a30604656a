#include "cellplan/world.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cellplan {

namespace {

double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// Squared distance from a point to an axis-aligned cell rectangle.
double point_rect_dist_sq(const Point3& p, double x0, double y0, double x1,
                          double y1) {
  const double dx = p.x - clamp(p.x, x0, x1);
  const double dy = p.y - clamp(p.y, y0, y1);
  return dx * dx + dy * dy;
}

std::string format_point(const Point3& p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ", " << p.z << ")";
  return os.str();
}

}  // namespace

OccupancyWorld OccupancyWorld::make_grid2d(int rows, int cols,
                                           const Config& cfg) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("grid dimensions must be positive");
  if (cfg.resolution <= 0.0)
    throw std::invalid_argument("resolution must be > 0");
  if (cfg.inflation_radius < 0.0)
    throw std::invalid_argument("inflation_radius must be >= 0");
  OccupancyWorld w;
  w.dim_ = 2;
  w.resolution_ = cfg.resolution;
  w.inflation_ = cfg.inflation_radius;
  w.semi_known_ = cfg.semi_known;
  w.rows_ = rows;
  w.cols_ = cols;
  w.true_grid_.assign(static_cast<std::size_t>(rows) * cols, 0);
  w.known_grid_.assign(static_cast<std::size_t>(rows) * cols, 0);
  w.bmin_ = {0.0, 0.0, 0.0};
  w.bmax_ = {cols * cfg.resolution, rows * cfg.resolution, 0.0};
  return w;
}

OccupancyWorld OccupancyWorld::make_points3d(std::vector<Point3> points,
                                             const Config& cfg) {
  if (cfg.resolution <= 0.0)
    throw std::invalid_argument("resolution must be > 0");
  if (cfg.inflation_radius < 0.0)
    throw std::invalid_argument("inflation_radius must be >= 0");
  OccupancyWorld w;
  w.dim_ = 3;
  w.resolution_ = cfg.resolution;
  w.inflation_ = cfg.inflation_radius;
  w.semi_known_ = cfg.semi_known;
  w.points_ = std::move(points);
  w.known_pts_.assign(w.points_.size(), cfg.semi_known ? 0 : 1);
  if (cfg.bounds) {
    w.bmin_ = cfg.bounds->first;
    w.bmax_ = cfg.bounds->second;
  } else {
    const double pad = 25.0;
    Point3 lo{-pad, -pad, -pad}, hi{pad, pad, pad};
    if (!w.points_.empty()) {
      lo = hi = w.points_.front();
      for (const Point3& p : w.points_) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
        hi.z = std::max(hi.z, p.z);
      }
      lo = lo + Point3{-pad, -pad, -pad};
      hi = hi + Point3{pad, pad, pad};
    }
    w.bmin_ = lo;
    w.bmax_ = hi;
  }
  if (!(w.bmin_.x < w.bmax_.x && w.bmin_.y < w.bmax_.y &&
        w.bmin_.z < w.bmax_.z))
    throw std::invalid_argument("bounds must have positive extent");
  return w;
}

bool OccupancyWorld::in_bounds(const Point3& p) const {
  if (dim_ == 2)
    return p.x >= bmin_.x && p.x < bmax_.x && p.y >= bmin_.y && p.y < bmax_.y;
  return p.x >= bmin_.x && p.x <= bmax_.x && p.y >= bmin_.y &&
         p.y <= bmax_.y && p.z >= bmin_.z && p.z <= bmax_.z;
}

void OccupancyWorld::set_cell(GridCell c, bool occupied) {
  if (!cell_in_grid(c)) throw std::out_of_range("set_cell: outside grid");
  true_grid_[idx(c)] = occupied ? 1 : 0;
  if (!semi_known_) known_grid_[idx(c)] = occupied ? 1 : 0;
  if (!occupied) known_grid_[idx(c)] = 0;
}

bool OccupancyWorld::cell_occupied(GridCell c, ObstacleView view) const {
  if (!cell_in_grid(c)) return true;
  if (view == ObstacleView::Truth) return true_grid_[idx(c)] != 0;
  return known_grid_[idx(c)] != 0;
}

GridCell OccupancyWorld::cell_at(const Point3& p) const {
  return {static_cast<int>(std::floor(p.y / resolution_)),
          static_cast<int>(std::floor(p.x / resolution_))};
}

Point3 OccupancyWorld::cell_center(GridCell c) const {
  return {(c.col + 0.5) * resolution_, (c.row + 0.5) * resolution_, 0.0};
}

std::size_t OccupancyWorld::true_count() const {
  if (dim_ == 3) return points_.size();
  return static_cast<std::size_t>(
      std::count(true_grid_.begin(), true_grid_.end(), 1));
}

std::size_t OccupancyWorld::known_count() const {
  if (dim_ == 3)
    return static_cast<std::size_t>(
        std::count(known_pts_.begin(), known_pts_.end(), 1));
  return static_cast<std::size_t>(
      std::count(known_grid_.begin(), known_grid_.end(), 1));
}

bool OccupancyWorld::occupied(const Point3& p, ObstacleView view) const {
  if (!p.finite()) return true;
  if (!in_bounds(p)) return true;
  if (dim_ == 3) {
    const double r2 = inflation_ * inflation_;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (view == ObstacleView::Known && known_pts_[i] == 0) continue;
      const Point3 d = p - points_[i];
      if (dot(d, d) <= r2) return true;
    }
    return false;
  }
  const GridCell own = cell_at(p);
  if (cell_occupied(own, view)) return true;
  if (inflation_ <= 0.0) return false;
  const int reach = static_cast<int>(std::ceil(inflation_ / resolution_));
  const double r2 = inflation_ * inflation_;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const GridCell c{own.row + dr, own.col + dc};
      if (!cell_in_grid(c)) continue;
      if (!cell_occupied(c, view)) continue;
      const double x0 = c.col * resolution_;
      const double y0 = c.row * resolution_;
      if (point_rect_dist_sq(p, x0, y0, x0 + resolution_, y0 + resolution_) <=
          r2)
        return true;
    }
  }
  return false;
}

int OccupancyWorld::reveal_sphere(const Point3& center, double range,
                                  std::vector<GridCell>* newly_known) {
  if (range < 0.0) throw std::invalid_argument("sensor range must be >= 0");
  int count = 0;
  if (dim_ == 3) {
    const double r2 = range * range;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (known_pts_[i]) continue;
      const Point3 d = points_[i] - center;
      if (dot(d, d) <= r2) {
        known_pts_[i] = 1;
        ++count;
      }
    }
    return count;
  }
  const double r2 = range * range;
  const int reach = static_cast<int>(std::ceil(range / resolution_)) + 1;
  const GridCell at = cell_at(center);
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      const GridCell c{at.row + dr, at.col + dc};
      if (!cell_in_grid(c)) continue;
      if (!true_grid_[idx(c)] || known_grid_[idx(c)]) continue;
      const Point3 d = cell_center(c) - center;
      if (d.x * d.x + d.y * d.y <= r2) {
        known_grid_[idx(c)] = 1;
        ++count;
        if (newly_known) newly_known->push_back(c);
      }
    }
  }
  return count;
}

// --- text formats ---

OccupancyWorld load_map_2d(const std::string& text,
                           const OccupancyWorld::Config& cfg) {
  std::vector<std::string> data_rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == ';') continue;
    if (!data_rows.empty() && line.size() != data_rows.front().size())
      throw FormatError("map row " + std::to_string(lineno) + ": width " +
                        std::to_string(line.size()) + " != " +
                        std::to_string(data_rows.front().size()));
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] != '#' && line[i] != '.')
        throw FormatError("map row " + std::to_string(lineno) + ", column " +
                          std::to_string(i + 1) + ": unknown character '" +
                          line[i] + "'");
    }
    data_rows.push_back(line);
  }
  if (data_rows.empty()) throw FormatError("map has no rows");
  const int rows = static_cast<int>(data_rows.size());
  const int cols = static_cast<int>(data_rows.front().size());
  OccupancyWorld w = OccupancyWorld::make_grid2d(rows, cols, cfg);
  // Text row 0 is the top of the map; grid row 0 is y = 0 at the bottom.
  for (int r = 0; r < rows; ++r) {
    const std::string& s = data_rows[rows - 1 - r];
    for (int c = 0; c < cols; ++c)
      if (s[c] == '#') w.set_cell({r, c}, true);
  }
  return w;
}

OccupancyWorld load_map_2d_file(const std::string& path,
                                const OccupancyWorld::Config& cfg) {
  return load_map_2d(read_text_file(path), cfg);
}

OccupancyWorld load_obstacles_3d(std::vector<Point3> pts,
                                 const OccupancyWorld::Config& cfg) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!pts[i].finite())
      throw FormatError("obstacle record " + std::to_string(i + 1) +
                        ": non-finite coordinate");
  return OccupancyWorld::make_points3d(std::move(pts), cfg);
}

namespace {

double parse_double(const std::string& field, int record,
                    const char* which) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw FormatError("obstacle record " + std::to_string(record) + ": bad " +
                      which + " value '" + field + "'");
  return v;
}

}  // namespace

OccupancyWorld load_obstacles_3d_csv(const std::string& text,
                                     const OccupancyWorld::Config& cfg) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("obstacle csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z")
    throw FormatError("obstacle csv header must be 'x,y,z', got '" + line +
                      "'");
  std::vector<Point3> pts;
  int record = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++record;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        line.find(',', c2 + 1) != std::string::npos)
      throw FormatError("obstacle record " + std::to_string(record) +
                        ": expected 3 fields");
    Point3 p;
    p.x = parse_double(line.substr(0, c1), record, "x");
    p.y = parse_double(line.substr(c1 + 1, c2 - c1 - 1), record, "y");
    p.z = parse_double(line.substr(c2 + 1), record, "z");
    if (!p.finite())
      throw FormatError("obstacle record " + std::to_string(record) +
                        ": non-finite coordinate");
    pts.push_back(p);
  }
  return OccupancyWorld::make_points3d(std::move(pts), cfg);
}

OccupancyWorld load_obstacles_3d_csv_file(const std::string& path,
                                          const OccupancyWorld::Config& cfg) {
  return load_obstacles_3d_csv(read_text_file(path), cfg);
}

std::string save_map_2d(const OccupancyWorld& w) {
  if (w.dimensionality() != 2)
    throw std::invalid_argument("save_map_2d: world is not 2-D");
  std::string out;
  out.reserve(static_cast<std::size_t>(w.rows()) * (w.cols() + 1));
  for (int r = w.rows() - 1; r >= 0; --r) {
    for (int c = 0; c < w.cols(); ++c)
      out += w.cell_occupied({r, c}, ObstacleView::Truth) ? '#' : '.';
    out += '\n';
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string save_obstacles_3d_csv(const OccupancyWorld& w) {
  if (w.dimensionality() != 3)
    throw std::invalid_argument("save_obstacles_3d_csv: world is not 3-D");
  std::string out = "x,y,z\n";
  for (const Point3& p : w.points()) {
    out += format_double(p.x);
    out += ',';
    out += format_double(p.y);
    out += ',';
    out += format_double(p.z);
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write file: " + path);
  out << text;
  if (!out) throw FormatError("cannot write file: " + path);
}

// --- queries ---

std::vector<Point3> known_obstacle_points(const OccupancyWorld& w) {
  std::vector<Point3> out;
  if (w.dimensionality() == 3) {
    for (std::size_t i = 0; i < w.points().size(); ++i)
      if (w.point_known(i)) out.push_back(w.points()[i]);
    return out;
  }
  for (int r = 0; r < w.rows(); ++r)
    for (int c = 0; c < w.cols(); ++c)
      if (w.cell_occupied({r, c}, ObstacleView::Known))
        out.push_back(w.cell_center({r, c}));
  return out;
}

bool segment_clear(const OccupancyWorld& w, const Point3& a, const Point3& b,
                   ObstacleView view) {
  const double len = euclid_dist(a, b);
  const int n = std::max(1, static_cast<int>(std::ceil(
                                len / (w.resolution() / 2.0))));
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    if (w.occupied(a + t * (b - a), view)) return false;
  }
  return true;
}

std::optional<double> nearest_obstacle_on_path(const OccupancyWorld& w,
                                               std::span<const Point3> path,
                                               const Point3& from,
                                               double max_dist) {
  if (w.occupied(from)) return 0.0;
  double walked = 0.0;
  Point3 prev = from;
  for (const Point3& next : path) {
    const double len = euclid_dist(prev, next);
    if (len > 0.0) {
      const int n = std::max(
          1, static_cast<int>(std::ceil(len / (w.resolution() / 2.0))));
      for (int i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        if (w.occupied(prev + t * (next - prev))) return walked + t * len;
        if (walked + t * len > max_dist) return std::nullopt;
      }
    }
    walked += len;
    prev = next;
  }
  return std::nullopt;
}

}  // namespace cellplan

#include "cellplan/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

namespace cellplan {

namespace {

struct Cursor {
  int lineno = 0;
  std::string key;

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError("scenario line " + std::to_string(lineno) + ", key '" +
                      key + "': " + msg);
  }
};

double to_double(const std::string& s, const Cursor& at) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    at.fail("bad number '" + s + "'");
  }
  if (used != s.size()) at.fail("bad number '" + s + "'");
  if (!std::isfinite(v)) at.fail("number must be finite");
  return v;
}

int to_int(const std::string& s, const Cursor& at) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    at.fail("bad integer '" + s + "'");
  }
  if (used != s.size()) at.fail("bad integer '" + s + "'");
  return v;
}

bool to_bool(const std::string& s, const Cursor& at) {
  if (s == "true") return true;
  if (s == "false") return false;
  at.fail("expected true or false, got '" + s + "'");
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

Point3 to_point(const std::string& s, int dims, const Cursor& at) {
  const auto parts = split_ws(s);
  if (static_cast<int>(parts.size()) != dims)
    at.fail("expected " + std::to_string(dims) + " numbers, got " +
            std::to_string(parts.size()));
  Point3 p;
  p.x = to_double(parts[0], at);
  if (dims >= 2) p.y = to_double(parts[1], at);
  if (dims >= 3) p.z = to_double(parts[2], at);
  return p;
}

}  // namespace

Scenario parse_scenario(const std::string& text,
                        const std::string& source_dir) {
  Scenario sc;
  sc.source_dir = source_dir;

  std::istringstream in(text);
  std::string line;
  Cursor at;
  bool saw_schema = false;
  std::set<std::string> seen;
  std::set<std::string> required_missing{"name", "map", "planner", "start",
                                         "goal"};
  double steer_max = 0.35;
  int steer_count = 3;

  while (std::getline(in, line)) {
    ++at.lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    const auto first = trimmed.find_first_not_of(" \t");
    trimmed = first == std::string::npos ? "" : trimmed.substr(first);
    if (trimmed.empty() || trimmed[0] == '#') continue;

    const auto colon = trimmed.find(':');
    if (colon == std::string::npos) {
      at.key = trimmed;
      at.fail("expected 'key: value'");
    }
    at.key = trimmed.substr(0, colon);
    std::string value = trimmed.substr(colon + 1);
    const auto vfirst = value.find_first_not_of(" \t");
    value = vfirst == std::string::npos ? "" : value.substr(vfirst);
    const auto vlast = value.find_last_not_of(" \t");
    if (vlast != std::string::npos) value = value.substr(0, vlast + 1);

    if (!seen.insert(at.key).second) at.fail("duplicate key");
    if (!saw_schema) {
      if (at.key != "schema") at.fail("first entry must be 'schema'");
      if (value != "scenario/1")
        at.fail("unsupported schema '" + value + "'");
      saw_schema = true;
      continue;
    }
    required_missing.erase(at.key);

    if (at.key == "name") sc.name = value;
    else if (at.key == "map") sc.map = value;
    else if (at.key == "planner") sc.planner = value;
    else if (at.key == "start") sc.start = to_point(value, 3, at);
    else if (at.key == "goal") sc.goal = to_point(value, 3, at);
    else if (at.key == "start_heading") sc.start_heading = to_double(value, at);
    else if (at.key == "resolution") sc.resolution = to_double(value, at);
    else if (at.key == "inflation_radius")
      sc.inflation_radius = to_double(value, at);
    else if (at.key == "semi_known") sc.semi_known = to_bool(value, at);
    else if (at.key == "sensor_range") sc.sensor_range = to_double(value, at);
    else if (at.key == "bounds") {
      const auto parts = split_ws(value);
      if (parts.size() != 6) at.fail("expected 6 numbers");
      Point3 lo{to_double(parts[0], at), to_double(parts[1], at),
                to_double(parts[2], at)};
      Point3 hi{to_double(parts[3], at), to_double(parts[4], at),
                to_double(parts[5], at)};
      sc.bounds = {lo, hi};
    } else if (at.key == "w1") sc.plan.w1 = to_double(value, at);
    else if (at.key == "w2") sc.plan.w2 = to_double(value, at);
    else if (at.key == "w_g") {
      sc.plan.w_g = to_double(value, at);
      sc.hybrid.w_g = sc.plan.w_g;
    } else if (at.key == "cellsize_min")
      sc.plan.cellsize_min = to_int(value, at);
    else if (at.key == "cellsize_max") sc.plan.cellsize_max = to_int(value, at);
    else if (at.key == "gridsize") sc.plan.gridsize = to_double(value, at);
    else if (at.key == "bigstep") sc.plan.bigstep = to_double(value, at);
    else if (at.key == "avoidance_range")
      sc.plan.avoidance_range = to_double(value, at);
    else if (at.key == "goal_tolerance") {
      sc.plan.goal_tolerance = to_double(value, at);
      sc.hybrid.goal_tolerance = sc.plan.goal_tolerance;
    } else if (at.key == "max_steps") {
      sc.plan.max_steps = to_int(value, at);
      sc.hybrid.max_steps = sc.plan.max_steps;
    } else if (at.key == "sign_check") {
      if (value == "corridor") sc.plan.membership_sign_only = false;
      else if (value == "membership") sc.plan.membership_sign_only = true;
      else at.fail("expected corridor or membership");
    } else if (at.key == "wheelbase")
      sc.sampler.wheelbase = to_double(value, at);
    else if (at.key == "steer_max") steer_max = to_double(value, at);
    else if (at.key == "steer_count") steer_count = to_int(value, at);
    else if (at.key == "sample_dist")
      sc.sampler.sample_dist = to_double(value, at);
    else if (at.key == "drive_direction")
      sc.sampler.direction = to_int(value, at);
    else if (at.key == "k_explore") sc.ack.k_explore = to_int(value, at);
    else if (at.key == "substeps") {
      sc.ack.substeps = to_int(value, at);
      sc.hybrid.substeps = sc.ack.substeps;
    } else if (at.key == "step_budget")
      sc.hybrid.step_budget = to_int(value, at);
    else if (at.key == "pos_bucket") sc.hybrid.pos_bucket = to_double(value, at);
    else if (at.key == "heading_bucket_deg")
      sc.hybrid.heading_bucket_deg = to_double(value, at);
    else if (at.key == "loop_threshold")
      sc.hybrid.loop_threshold = to_int(value, at);
    else if (at.key == "lattice_step")
      sc.hybrid.lattice_step = to_double(value, at);
    else at.fail("unknown key");
  }

  if (!saw_schema) throw FormatError("scenario: missing schema line");
  if (!required_missing.empty())
    throw FormatError("scenario: missing required key '" +
                      *required_missing.begin() + "'");

  static const std::set<std::string> planners{
      "cell_astar", "cell_astar_ackermann", "hybrid_astar",
      "hybrid_astar_lattice", "dstar_lite"};
  if (!planners.count(sc.planner))
    throw FormatError("scenario: unknown planner '" + sc.planner + "'");

  if (steer_count < 1 || steer_count % 2 == 0)
    throw FormatError("scenario: steer_count must be odd and >= 1");
  if (!(steer_max > 0.0))
    throw FormatError("scenario: steer_max must be > 0");
  sc.sampler.steering_set.clear();
  if (steer_count == 1) {
    sc.sampler.steering_set.push_back(0.0);
  } else {
    for (int i = 0; i < steer_count; ++i)
      sc.sampler.steering_set.push_back(-steer_max +
                                        2.0 * steer_max * i / (steer_count - 1));
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  const std::filesystem::path p(path);
  Scenario sc = parse_scenario(read_text_file(path),
                               p.has_parent_path() ? p.parent_path().string()
                                                   : ".");
  if (sc.name.empty()) sc.name = p.stem().string();
  return sc;
}

namespace {

OccupancyWorld build_random_grid(const std::string& spec, const Scenario& sc) {
  // random:<cols>x<rows>:density=<d>:seed=<n>
  auto fail = [&](const std::string& msg) {
    throw FormatError("scenario map '" + spec + "': " + msg);
  };
  std::vector<std::string> parts;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ':')) parts.push_back(tok);
  if (parts.size() != 4) fail("expected random:<cols>x<rows>:density=<d>:seed=<n>");
  const auto xpos = parts[1].find('x');
  if (xpos == std::string::npos) fail("bad size");
  int cols = 0, rows = 0;
  try {
    cols = std::stoi(parts[1].substr(0, xpos));
    rows = std::stoi(parts[1].substr(xpos + 1));
  } catch (const std::exception&) {
    fail("bad size");
  }
  if (parts[2].rfind("density=", 0) != 0) fail("expected density=<d>");
  if (parts[3].rfind("seed=", 0) != 0) fail("expected seed=<n>");
  double density = 0.0;
  unsigned seed = 0;
  try {
    density = std::stod(parts[2].substr(8));
    seed = static_cast<unsigned>(std::stoul(parts[3].substr(5)));
  } catch (const std::exception&) {
    fail("bad density or seed");
  }
  if (!(density >= 0.0 && density < 1.0)) fail("density must be in [0, 1)");
  if (rows < 4 || cols < 4) fail("grid must be at least 4x4");

  OccupancyWorld::Config cfg;
  cfg.resolution = sc.resolution;
  cfg.inflation_radius = sc.inflation_radius;
  cfg.semi_known = sc.semi_known;
  OccupancyWorld w = OccupancyWorld::make_grid2d(rows, cols, cfg);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (uniform(rng) < density) w.set_cell({r, c}, true);

  // Keep the endpoints usable.
  for (GridCell seed_cell : {w.cell_at(sc.start), w.cell_at(sc.goal)})
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        const GridCell c{seed_cell.row + dr, seed_cell.col + dc};
        if (w.cell_in_grid(c)) w.set_cell(c, false);
      }
  return w;
}

}  // namespace

OccupancyWorld build_world(const Scenario& sc) {
  if (sc.map.rfind("random:", 0) == 0) return build_random_grid(sc.map, sc);

  const std::filesystem::path mapped =
      std::filesystem::path(sc.map).is_absolute()
          ? std::filesystem::path(sc.map)
          : std::filesystem::path(sc.source_dir) / sc.map;

  OccupancyWorld::Config cfg;
  cfg.resolution = sc.resolution;
  cfg.inflation_radius = sc.inflation_radius;
  cfg.semi_known = sc.semi_known;
  cfg.bounds = sc.bounds;

  const std::string ext = mapped.extension().string();
  if (ext == ".csv") return load_obstacles_3d_csv_file(mapped.string(), cfg);
  return load_map_2d_file(mapped.string(), cfg);
}

std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream os;
  os << "schema: scenario/1\n";
  os << "name: " << sc.name << "\n";
  os << "map: " << sc.map << "\n";
  os << "planner: " << sc.planner << "\n";
  os << "start: " << format_double(sc.start.x) << " "
     << format_double(sc.start.y) << " " << format_double(sc.start.z) << "\n";
  os << "goal: " << format_double(sc.goal.x) << " " << format_double(sc.goal.y)
     << " " << format_double(sc.goal.z) << "\n";
  os << "resolution: " << format_double(sc.resolution) << "\n";
  os << "inflation_radius: " << format_double(sc.inflation_radius) << "\n";
  os << "semi_known: " << (sc.semi_known ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace cellplan

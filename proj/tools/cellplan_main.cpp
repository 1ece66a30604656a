#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cellplan/bench.hpp"
#include "cellplan/scenario.hpp"
#include "cellplan/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace cellplan;

namespace {

std::string revealed_csv(const OccupancyWorld& w) {
  std::string out = "x,y,z\n";
  for (const Point3& p : known_obstacle_points(w)) {
    out += format_double(p.x);
    out += ',';
    out += format_double(p.y);
    out += ',';
    out += format_double(p.z);
    out += '\n';
  }
  return out;
}

std::string cells_csv(const std::vector<StepTrace>& traces) {
  std::string out = "step,mode,cx,cy,cz,cellsize,gridsize\n";
  for (const StepTrace& t : traces) {
    out += std::to_string(t.step);
    out += ',';
    out += t.mode;
    out += ',';
    out += format_double(t.center.x);
    out += ',';
    out += format_double(t.center.y);
    out += ',';
    out += format_double(t.center.z);
    out += ',';
    out += std::to_string(t.cellsize);
    out += ',';
    out += format_double(t.gridsize);
    out += '\n';
  }
  return out;
}

std::vector<Point3> read_points_csv(const std::string& path,
                                    bool with_index_col) {
  const std::string text = read_text_file(path);
  std::vector<Point3> pts;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty csv: " + path);
  int record = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++record;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    const std::size_t want = with_index_col ? 4 : 3;
    if (fields.size() != want)
      throw FormatError(path + " record " + std::to_string(record) +
                        ": expected " + std::to_string(want) + " fields");
    try {
      const std::size_t off = with_index_col ? 1 : 0;
      pts.push_back({std::stod(fields[off]), std::stod(fields[off + 1]),
                     std::stod(fields[off + 2])});
    } catch (const std::exception&) {
      throw FormatError(path + " record " + std::to_string(record) +
                        ": bad number");
    }
  }
  return pts;
}

std::vector<StepTrace> read_cells_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<StepTrace> traces;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty csv: " + path);
  int record = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++record;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (fields.size() != 7)
      throw FormatError(path + " record " + std::to_string(record) +
                        ": expected 7 fields");
    try {
      StepTrace t;
      t.step = std::stoi(fields[0]);
      t.mode = fields[1].empty() ? 'F' : fields[1][0];
      t.center = {std::stod(fields[2]), std::stod(fields[3]),
                  std::stod(fields[4])};
      t.cellsize = std::stoi(fields[5]);
      t.gridsize = std::stod(fields[6]);
      traces.push_back(t);
    } catch (const std::exception&) {
      throw FormatError(path + " record " + std::to_string(record) +
                        ": bad number");
    }
  }
  return traces;
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_')
               ? c
               : '_';
  return out.empty() ? std::string("run") : out;
}

int exit_code_for(Outcome o) { return o == Outcome::Success ? 0 : 2; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cell-based receding-horizon path planning benchmarks"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  app.add_option("--out", out_dir, "output directory")
      ->envname("CELLPLAN_OUT_DIR")
      ->capture_default_str();

  // --- plan ---
  auto* plan_cmd = app.add_subcommand("plan", "run one scenario");
  std::string scenario_path;
  plan_cmd->add_option("--scenario", scenario_path, "scenario file")
      ->required();
  std::string base_name;
  plan_cmd->add_option("--base", base_name,
                       "output base name (default: scenario name)");
  bool dump_cells = false;
  plan_cmd->add_flag("--dump-cells", dump_cells,
                     "also write <base>_cells.csv with per-step search cells");
  bool write_svg = false;
  plan_cmd->add_flag("--svg", write_svg, "also render <base>.svg");
  std::optional<double> ov_w1, ov_w2, ov_gridsize, ov_bigstep, ov_avoid,
      ov_tol;
  std::optional<int> ov_csmin, ov_csmax, ov_max_steps;
  plan_cmd->add_option("--w1", ov_w1, "override w1");
  plan_cmd->add_option("--w2", ov_w2, "override w2");
  plan_cmd->add_option("--cellsize-min", ov_csmin, "override cellsize_min");
  plan_cmd->add_option("--cellsize-max", ov_csmax, "override cellsize_max");
  plan_cmd->add_option("--gridsize", ov_gridsize, "override gridsize");
  plan_cmd->add_option("--bigstep", ov_bigstep, "override bigstep");
  plan_cmd->add_option("--avoidance-range", ov_avoid,
                       "override avoidance_range");
  plan_cmd->add_option("--goal-tolerance", ov_tol, "override goal_tolerance");
  plan_cmd->add_option("--max-steps", ov_max_steps, "override max_steps");

  // --- bench ---
  auto* bench_cmd = app.add_subcommand("bench", "run a scenario suite");
  std::string suite_dir;
  bench_cmd->add_option("--suite", suite_dir, "directory of .scn files")
      ->required();
  bool export_each = false;
  bench_cmd->add_flag("--export-runs", export_each,
                      "write per-run trajectory and metrics files");
  std::vector<std::string> planner_filter;
  bench_cmd->add_option("--planner", planner_filter,
                        "only run scenarios using these planners");

  // --- plot ---
  auto* plot_cmd = app.add_subcommand("plot", "render a run to SVG");
  std::string map_path, traj_path, revealed_path, cells_path, svg_path;
  double resolution = 1.0, inflation = 0.5, scale = 12.0;
  int cell_steps = 0;
  std::vector<std::string> hide;
  plot_cmd->add_option("--map", map_path, "map file (.csv points or grid)")
      ->required();
  plot_cmd->add_option("--trajectory", traj_path, "trajectory csv")
      ->required();
  plot_cmd->add_option("--revealed", revealed_path, "revealed obstacles csv");
  plot_cmd->add_option("--cells", cells_path, "search-cell trace csv");
  plot_cmd->add_option("--svg", svg_path, "output svg path")->required();
  plot_cmd->add_option("--resolution", resolution, "map resolution")
      ->capture_default_str();
  plot_cmd->add_option("--inflation", inflation, "inflation radius")
      ->capture_default_str();
  plot_cmd->add_option("--scale", scale, "pixels per meter")
      ->capture_default_str();
  plot_cmd->add_option("--cell-steps", cell_steps,
                       "draw search cells for the first N steps (0 = all)");
  plot_cmd->add_option("--hide", hide,
                       "layers to hide: obstacles revealed trajectory markers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*plan_cmd) {
      Scenario sc = load_scenario_file(scenario_path);
      if (ov_w1) sc.plan.w1 = *ov_w1;
      if (ov_w2) sc.plan.w2 = *ov_w2;
      if (ov_csmin) sc.plan.cellsize_min = *ov_csmin;
      if (ov_csmax) sc.plan.cellsize_max = *ov_csmax;
      if (ov_gridsize) sc.plan.gridsize = *ov_gridsize;
      if (ov_bigstep) sc.plan.bigstep = *ov_bigstep;
      if (ov_avoid) sc.plan.avoidance_range = *ov_avoid;
      if (ov_tol) {
        sc.plan.goal_tolerance = *ov_tol;
        sc.hybrid.goal_tolerance = *ov_tol;
      }
      if (ov_max_steps) {
        sc.plan.max_steps = *ov_max_steps;
        sc.hybrid.max_steps = *ov_max_steps;
      }

      const RunRecord record = run_scenario(sc);
      const RunMetrics& m = record.result.metrics;
      const std::string base =
          base_name.empty() ? sanitize(sc.name) : sanitize(base_name);
      export_run(m, record.result.trajectory, out_dir, base);
      const fs::path dir(out_dir);
      if (sc.semi_known)
        write_text_file((dir / (base + "_revealed.csv")).string(),
                        revealed_csv(record.world));
      if (dump_cells)
        write_text_file((dir / (base + "_cells.csv")).string(),
                        cells_csv(record.result.step_traces));
      if (write_svg) {
        PlotSpec spec;
        const std::vector<Point3> line = record.result.trajectory.polyline();
        write_text_file((dir / (base + ".svg")).string(),
                        render_svg(record.world, line, {},
                                   record.result.step_traces, spec));
      }

      std::cout << "scenario " << sc.name << ": outcome=" << to_string(m.outcome)
                << " length=" << m.path_length_m << "m nodes=" << m.nodes_total
                << " steps=" << m.steps << " time=" << m.wall_time_s << "s\n";
      if (!m.detail.empty()) std::cout << "  detail: " << m.detail << "\n";
      std::cout << "  wrote " << (fs::path(out_dir) / (base + "_trajectory.csv")).string()
                << " and " << (fs::path(out_dir) / (base + "_metrics.json")).string()
                << "\n";
      return exit_code_for(m.outcome);
    }

    if (*bench_cmd) {
      std::vector<fs::path> files;
      if (!fs::is_directory(suite_dir))
        throw FormatError("suite is not a directory: " + suite_dir);
      for (const auto& entry : fs::directory_iterator(suite_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".scn")
          files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      if (files.empty())
        throw FormatError("no .scn files in suite: " + suite_dir);

      std::vector<RunRecord> records;
      for (const fs::path& f : files) {
        Scenario sc = load_scenario_file(f.string());
        if (!planner_filter.empty() &&
            std::find(planner_filter.begin(), planner_filter.end(),
                      sc.planner) == planner_filter.end())
          continue;
        records.push_back(run_scenario(sc));
        const RunMetrics& m = records.back().result.metrics;
        std::cout << records.back().scenario.name << ": "
                  << to_string(m.outcome) << " (" << m.wall_time_s << "s)\n";
        if (export_each)
          export_run(m, records.back().result.trajectory, out_dir,
                     sanitize(records.back().scenario.name));
      }
      if (records.empty())
        throw FormatError("no scenarios matched the planner filter");
      const ComparisonTable table = compare(records);
      fs::create_directories(out_dir);
      write_text_file((fs::path(out_dir) / "comparison.csv").string(),
                      table.to_csv());
      write_text_file((fs::path(out_dir) / "comparison.txt").string(),
                      table.to_text());
      std::cout << "\n" << table.to_text();
      std::cout << "wrote " << (fs::path(out_dir) / "comparison.csv").string()
                << "\n";
      return 0;
    }

    if (*plot_cmd) {
      OccupancyWorld::Config cfg;
      cfg.resolution = resolution;
      cfg.inflation_radius = inflation;
      const bool points_map =
          fs::path(map_path).extension().string() == ".csv";
      OccupancyWorld world = points_map
                                 ? load_obstacles_3d_csv_file(map_path, cfg)
                                 : load_map_2d_file(map_path, cfg);
      const std::vector<Point3> traj = read_points_csv(traj_path, true);
      if (world.dimensionality() == 2)
        for (const Point3& p : traj)
          if (p.z != 0.0)
            throw FormatError("trajectory has z values but the map is 2-D");
      std::vector<Point3> revealed;
      if (!revealed_path.empty())
        revealed = read_points_csv(revealed_path, false);
      std::vector<StepTrace> traces;
      if (!cells_path.empty()) traces = read_cells_csv(cells_path);

      PlotSpec spec;
      spec.scale = scale;
      spec.cell_steps = cell_steps;
      spec.layers.cells = !cells_path.empty();
      for (const std::string& h : hide) {
        if (h == "obstacles") spec.layers.obstacles = false;
        else if (h == "revealed") spec.layers.revealed = false;
        else if (h == "trajectory") spec.layers.trajectory = false;
        else if (h == "markers") spec.layers.markers = false;
        else if (h == "cells") spec.layers.cells = false;
        else throw FormatError("unknown layer '" + h + "'");
      }

      const std::string svg = render_svg(world, traj, revealed, traces, spec);
      if (const fs::path out(svg_path); out.has_parent_path())
        fs::create_directories(out.parent_path());
      write_text_file(svg_path, svg);
      std::cout << "wrote " << svg_path << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

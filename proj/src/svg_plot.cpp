#include "cellplan/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cellplan {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

struct Panel {
  double ox, oy;       // svg offset of the panel origin
  double scale;
  double ymax;         // world-axis value mapped to the panel top
  bool use_z;          // plot world z instead of world y

  double sx(const Point3& p) const { return ox + p.x * scale; }
  double sy(const Point3& p) const {
    return oy + (ymax - (use_z ? p.z : p.y)) * scale;
  }
};

void draw_panel(std::ostringstream& os, const OccupancyWorld& w,
                std::span<const Point3> trajectory,
                std::span<const Point3> revealed,
                std::span<const StepTrace> traces, const PlotSpec& spec,
                const Panel& panel, const char* label) {
  const Point3 lo = w.bounds_min();
  const Point3 hi = w.bounds_max();
  const double wpx = (hi.x - lo.x) * panel.scale;
  const double hpx =
      ((panel.use_z ? hi.z : hi.y) - (panel.use_z ? lo.z : lo.y)) * panel.scale;

  os << "<g>\n";
  os << "<rect x=\"" << num(panel.ox + lo.x * panel.scale) << "\" y=\""
     << num(panel.oy) << "\" width=\"" << num(wpx) << "\" height=\""
     << num(hpx) << "\" fill=\"white\" stroke=\"#444444\"/>\n";
  os << "<text x=\"" << num(panel.ox + lo.x * panel.scale + 4) << "\" y=\""
     << num(panel.oy + 14) << "\" font-size=\"12\" fill=\"#444444\">" << label
     << "</text>\n";

  if (spec.layers.obstacles) {
    if (w.dimensionality() == 2) {
      for (int r = 0; r < w.rows(); ++r) {
        for (int c = 0; c < w.cols(); ++c) {
          if (!w.cell_occupied({r, c}, ObstacleView::Truth)) continue;
          const bool known = w.cell_occupied({r, c}, ObstacleView::Known);
          const Point3 corner{c * w.resolution(), (r + 1) * w.resolution(),
                              0.0};
          os << "<rect x=\"" << num(panel.sx(corner)) << "\" y=\""
             << num(panel.sy(corner)) << "\" width=\""
             << num(w.resolution() * panel.scale) << "\" height=\""
             << num(w.resolution() * panel.scale) << "\" fill=\""
             << (known ? "#c0392b" : "#d8d8d8") << "\"/>\n";
        }
      }
    } else {
      const double r = std::max(1.5, w.inflation_radius() * panel.scale);
      for (std::size_t i = 0; i < w.points().size(); ++i) {
        const bool known = w.point_known(i);
        os << "<circle cx=\"" << num(panel.sx(w.points()[i])) << "\" cy=\""
           << num(panel.sy(w.points()[i])) << "\" r=\"" << num(r)
           << "\" fill=\"" << (known ? "#c0392b" : "#d8d8d8") << "\"/>\n";
      }
    }
  }

  if (spec.layers.revealed) {
    for (const Point3& p : revealed) {
      os << "<circle cx=\"" << num(panel.sx(p)) << "\" cy=\""
         << num(panel.sy(p)) << "\" r=\"2.00\" fill=\"#e67e22\"/>\n";
    }
  }

  if (spec.layers.cells) {
    int drawn = 0;
    for (const StepTrace& t : traces) {
      if (spec.cell_steps > 0 && drawn >= spec.cell_steps) break;
      const double half = (t.cellsize - 1) / 2 * t.gridsize;
      const Point3 corner{t.center.x - half, t.center.y + half,
                          t.center.z + half};
      os << "<rect x=\"" << num(panel.sx(corner)) << "\" y=\""
         << num(panel.sy(corner)) << "\" width=\""
         << num(2 * half * panel.scale) << "\" height=\""
         << num(2 * half * panel.scale)
         << "\" fill=\"none\" stroke=\"#2980b9\" stroke-width=\"0.8\"/>\n";
      ++drawn;
    }
  }

  if (spec.layers.trajectory && trajectory.size() > 1) {
    os << "<polyline fill=\"none\" stroke=\"#27ae60\" stroke-width=\"1.5\" "
          "points=\"";
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
      if (i) os << " ";
      os << num(panel.sx(trajectory[i])) << "," << num(panel.sy(trajectory[i]));
    }
    os << "\"/>\n";
  }

  if (spec.layers.markers && !trajectory.empty()) {
    const Point3 a = trajectory.front();
    const Point3 b = trajectory.back();
    os << "<circle cx=\"" << num(panel.sx(a)) << "\" cy=\"" << num(panel.sy(a))
       << "\" r=\"4.00\" fill=\"#2980b9\"/>\n";
    os << "<circle cx=\"" << num(panel.sx(b)) << "\" cy=\"" << num(panel.sy(b))
       << "\" r=\"4.00\" fill=\"none\" stroke=\"#8e44ad\" "
          "stroke-width=\"2\"/>\n";
  }
  os << "</g>\n";
}

}  // namespace

std::string render_svg(const OccupancyWorld& w,
                       std::span<const Point3> trajectory,
                       std::span<const Point3> revealed,
                       std::span<const StepTrace> traces,
                       const PlotSpec& spec) {
  const Point3 lo = w.bounds_min();
  const Point3 hi = w.bounds_max();
  const double scale = spec.scale;
  const double wpx = (hi.x - lo.x) * scale;
  const bool two_panels = w.dimensionality() == 3;

  const double panel1_h = (hi.y - lo.y) * scale;
  const double panel2_h = two_panels ? (hi.z - lo.z) * scale : 0.0;
  const double total_w = wpx + 2 * spec.margin;
  const double total_h = panel1_h + (two_panels ? panel2_h + spec.margin : 0) +
                         2 * spec.margin;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(total_w)
     << "\" height=\"" << num(total_h) << "\" viewBox=\"0 0 " << num(total_w)
     << " " << num(total_h) << "\">\n";

  Panel top;
  top.ox = spec.margin - lo.x * scale;
  top.oy = spec.margin;
  top.scale = scale;
  top.ymax = hi.y;
  top.use_z = false;
  draw_panel(os, w, trajectory, revealed, traces, spec, top,
             two_panels ? "x-y" : "map");

  if (two_panels) {
    Panel side;
    side.ox = spec.margin - lo.x * scale;
    side.oy = 2 * spec.margin + panel1_h;
    side.scale = scale;
    side.ymax = hi.z;
    side.use_z = true;
    draw_panel(os, w, trajectory, revealed, traces, spec, side, "x-z");
  }

  os << "</svg>\n";
  return os.str();
}

}  // namespace cellplan

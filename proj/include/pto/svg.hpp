#pragma once

// Deterministic SVG rendering of a scenario with an optional path-tree or
// random graph on top. Numbers are printed with fixed precision so output
// is byte-stable.

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "pto/path_tree.hpp"
#include "pto/rrg.hpp"
#include "pto/scenario.hpp"

namespace pto {

struct SvgOptions {
  double pixels_per_meter = 40.0;
  double margin = 10.0;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

class SvgCanvas {
 public:
  SvgCanvas(const Box& bounds, const SvgOptions& opt) : b_(bounds), o_(opt) {}

  double px(double x) const { return o_.margin + (x - b_.min.x) * o_.pixels_per_meter; }
  double py(double y) const { return o_.margin + (b_.max.y - y) * o_.pixels_per_meter; }
  double len(double d) const { return d * o_.pixels_per_meter; }
  double width() const { return 2 * o_.margin + len(b_.width()); }
  double height() const { return 2 * o_.margin + len(b_.height()); }

  std::string point_list(const std::vector<Vec2>& pts) const {
    std::string s;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) s += ' ';
      s += fmt(px(pts[i].x)) + ',' + fmt(py(pts[i].y));
    }
    return s;
  }

  void line(std::ostream& os, Vec2 a, Vec2 b, const std::string& style) const {
    os << "<line x1=\"" << fmt(px(a.x)) << "\" y1=\"" << fmt(py(a.y)) << "\" x2=\"" << fmt(px(b.x)) << "\" y2=\""
       << fmt(py(b.y)) << "\" " << style << "/>\n";
  }

  void circle(std::ostream& os, Vec2 c, double r_px, const std::string& style) const {
    os << "<circle cx=\"" << fmt(px(c.x)) << "\" cy=\"" << fmt(py(c.y)) << "\" r=\"" << fmt(r_px) << "\" " << style
       << "/>\n";
  }

 private:
  Box b_;
  SvgOptions o_;
};

inline const std::array<const char*, 8> kBranchColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                         "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

inline void draw_scenario(std::ostream& os, const Scenario& sc, const SvgCanvas& cv) {
  os << "<rect x=\"" << fmt(cv.px(sc.bounds.min.x)) << "\" y=\"" << fmt(cv.py(sc.bounds.max.y)) << "\" width=\""
     << fmt(cv.len(sc.bounds.width())) << "\" height=\"" << fmt(cv.len(sc.bounds.height()))
     << "\" fill=\"#ffffff\" stroke=\"#000000\"/>\n";
  for (const GoalSpec& g : sc.goals) {
    const std::string style = "fill=\"#b8e6b8\" fill-opacity=\"0.6\" stroke=\"#2e8b2e\"";
    if (g.region.is_disc()) {
      cv.circle(os, g.region.disc().center, cv.len(g.region.disc().radius), style);
    } else {
      const Box& b = g.region.box();
      os << "<rect x=\"" << fmt(cv.px(b.min.x)) << "\" y=\"" << fmt(cv.py(b.max.y)) << "\" width=\""
         << fmt(cv.len(b.width())) << "\" height=\"" << fmt(cv.len(b.height())) << "\" " << style << "/>\n";
    }
  }
  for (const Polygon& p : sc.obstacles)
    os << "<polygon points=\"" << cv.point_list(p.vertices()) << "\" fill=\"#555555\"/>\n";
  for (const UncertainFactor& f : sc.factors) {
    cv.circle(os, f.zone.center, cv.len(f.zone.radius),
              "fill=\"none\" stroke=\"#1f77b4\" stroke-dasharray=\"4,3\"");
    if (f.kind == FactorKind::Door) {
      os << "<polygon points=\"" << cv.point_list(f.blocking.vertices())
         << "\" fill=\"#c98b3c\" fill-opacity=\"0.7\"/>\n";
    } else {
      cv.circle(os, f.a, 4.0, "fill=\"#c98b3c\"");
    }
  }
  cv.circle(os, sc.start, 5.0, "fill=\"#000000\"");
}

}  // namespace detail

/// Scenario, then the tree: motion edges colored by branch (a new color
/// after every observation outcome), branching nodes as blue rings.
inline std::string render_svg(const Scenario& sc, const PathTree* tree, const RRGraph* graph,
                              const SvgOptions& opt = {}) {
  const detail::SvgCanvas cv(sc.bounds, opt);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fmt(cv.width()) << "\" height=\""
     << detail::fmt(cv.height()) << "\">\n";
  detail::draw_scenario(os, sc, cv);
  if (graph) {
    os << "<g stroke=\"#bbbbbb\" stroke-width=\"0.5\">\n";
    for (const RrgEdge& e : graph->edges) cv.line(os, graph->nodes[e.u].config, graph->nodes[e.v].config, "");
    os << "</g>\n";
  }
  if (tree && !tree->nodes.empty()) {
    std::vector<std::size_t> branch(tree->nodes.size(), 0);
    std::size_t next_branch = 1;
    for (std::size_t i = 1; i < tree->nodes.size(); ++i) {
      const PathTreeNode& n = tree->nodes[i];
      const auto p = static_cast<std::size_t>(n.parent);
      branch[i] = n.outcome ? next_branch++ : branch[p];
      if (n.outcome) continue;
      const char* color = detail::kBranchColors[branch[i] % detail::kBranchColors.size()];
      cv.line(os, tree->nodes[p].config, n.config,
              std::string("stroke=\"") + color + "\" stroke-width=\"2\" stroke-linecap=\"round\"");
    }
    for (const PathTreeNode& n : tree->nodes) {
      if (n.kind == TreeNodeKind::Branching)
        cv.circle(os, n.config, 7.0, "fill=\"none\" stroke=\"#0000ff\" stroke-width=\"2\"");
      else if (n.kind == TreeNodeKind::Leaf)
        cv.circle(os, n.config, 3.0, "fill=\"#2e8b2e\"");
    }
  }
  os << "</svg>\n";
  return os.str();
}

struct BarSeries {
  std::string label;
  std::vector<double> values;  // one per group
  std::vector<double> errors;  // optional, same length
};

/// Grouped bar chart, one group per label, one bar per series.
inline std::string render_bar_chart(const std::string& title, const std::vector<std::string>& groups,
                                    const std::vector<BarSeries>& series) {
  const double w = 640, h = 360, left = 60, bottom = 40, top = 40, right = 20;
  double vmax = 0.0;
  for (const BarSeries& s : series)
    for (std::size_t i = 0; i < s.values.size(); ++i)
      vmax = std::max(vmax, s.values[i] + (i < s.errors.size() ? s.errors[i] : 0.0));
  if (!(vmax > 0.0)) vmax = 1.0;
  const double plot_w = w - left - right;
  const double plot_h = h - top - bottom;
  const double group_w = groups.empty() ? plot_w : plot_w / static_cast<double>(groups.size());
  const double bar_w = series.empty() ? 0.0 : 0.8 * group_w / static_cast<double>(series.size());
  const auto y_of = [&](double v) { return top + plot_h * (1.0 - v / vmax); };
  using detail::fmt;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h) << "\">\n";
  os << "<text x=\"" << fmt(w / 2) << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
  os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + plot_h) << "\" x2=\"" << fmt(w - right) << "\" y2=\""
     << fmt(top + plot_h) << "\" stroke=\"#000000\"/>\n";
  os << "<text x=\"5\" y=\"" << fmt(top) << "\">" << fmt(vmax) << "</text>\n";
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = left + group_w * static_cast<double>(g);
    os << "<text x=\"" << fmt(gx + group_w / 2) << "\" y=\"" << fmt(h - 15) << "\" text-anchor=\"middle\">" << groups[g]
       << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (g >= series[k].values.size()) continue;
      const double v = series[k].values[g];
      const double x = gx + 0.1 * group_w + bar_w * static_cast<double>(k);
      os << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y_of(v)) << "\" width=\"" << fmt(bar_w) << "\" height=\""
         << fmt(top + plot_h - y_of(v)) << "\" fill=\"" << detail::kBranchColors[k % detail::kBranchColors.size()]
         << "\"/>\n";
      if (g < series[k].errors.size() && series[k].errors[g] > 0.0) {
        const double cx = x + bar_w / 2;
        os << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y_of(v - series[k].errors[g])) << "\" x2=\"" << fmt(cx)
           << "\" y2=\"" << fmt(y_of(v + series[k].errors[g])) << "\" stroke=\"#000000\"/>\n";
      }
    }
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double ly = top + 15.0 * static_cast<double>(k);
    os << "<rect x=\"" << fmt(w - right - 110) << "\" y=\"" << fmt(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
       << detail::kBranchColors[k % detail::kBranchColors.size()] << "\"/>\n";
    os << "<text x=\"" << fmt(w - right - 95) << "\" y=\"" << fmt(ly) << "\">" << series[k].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace pto

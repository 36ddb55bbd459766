// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trajcast {
namespace {

struct Bounds {
  double min_x = 0.0, min_y = 0.0, max_x = 1.0, max_y = 1.0;
  bool touched = false;

  void grow(double x, double y) {
    if (!touched) {
      min_x = max_x = x;
      min_y = max_y = y;
      touched = true;
      return;
    }
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << v;
  return os.str();
}

class SvgCanvas {
 public:
  SvgCanvas(const Bounds& b, double size) : size_(size) {
    double w = std::max(b.max_x - b.min_x, 1.0);
    double h = std::max(b.max_y - b.min_y, 1.0);
    double span = std::max(w, h) * 1.1;
    scale_ = size / span;
    // Center the view; SVG y grows downward, world y grows upward.
    cx_ = (b.min_x + b.max_x) / 2.0;
    cy_ = (b.min_y + b.max_y) / 2.0;
  }

  double x(double wx) const { return size_ / 2.0 + (wx - cx_) * scale_; }
  double y(double wy) const { return size_ / 2.0 - (wy - cy_) * scale_; }

  void polyline(std::ostringstream& os, const std::vector<std::array<double, 2>>& pts,
                const std::string& stroke, double width, double opacity) const {
    if (pts.size() < 2) return;
    os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(width)
       << "\" stroke-opacity=\"" << fmt(opacity) << "\" points=\"";
    for (const auto& p : pts) os << fmt(x(p[0])) << ',' << fmt(y(p[1])) << ' ';
    os << "\"/>\n";
  }

  void circle(std::ostringstream& os, double wx, double wy, double r,
              const std::string& fill) const {
    os << "<circle cx=\"" << fmt(x(wx)) << "\" cy=\"" << fmt(y(wy)) << "\" r=\"" << fmt(r)
       << "\" fill=\"" << fill << "\"/>\n";
  }

  void text(std::ostringstream& os, double wx, double wy, const std::string& s,
            const std::string& fill) const {
    os << "<text x=\"" << fmt(x(wx)) << "\" y=\"" << fmt(y(wy)) << "\" font-size=\"11\" fill=\""
       << fill << "\" font-family=\"sans-serif\">" << s << "</text>\n";
  }

 private:
  double size_, scale_, cx_, cy_;
};

std::vector<std::array<double, 2>> track_points(const std::vector<AgentState>& states) {
  std::vector<std::array<double, 2>> pts;
  for (const AgentState& s : states)
    if (s.valid) pts.push_back({s.x, s.y});
  return pts;
}

}  // namespace

std::string scene_svg(const Scene& scene, const ModeSet* modes) {
  constexpr double kSize = 800.0;

  Bounds b;
  for (const RoadGraphPolyline& p : scene.roadgraph)
    for (const RoadGraphNode& n : p.nodes) b.grow(n.x, n.y);
  for (const AgentState& s : scene.target.history)
    if (s.valid) b.grow(s.x, s.y);
  for (const AgentState& s : scene.target.future)
    if (s.valid) b.grow(s.x, s.y);
  for (const AgentTrack& nb : scene.neighbors)
    for (const AgentState& s : nb.history)
      if (s.valid) b.grow(s.x, s.y);
  if (modes)
    for (const ModeTrajectory& m : modes->modes)
      for (const Point2& p : m.points) b.grow(p[0], p[1]);

  SvgCanvas canvas(b, kSize);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
     << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const RoadGraphPolyline& p : scene.roadgraph) {
    std::vector<std::array<double, 2>> pts;
    for (const RoadGraphNode& n : p.nodes) pts.push_back({n.x, n.y});
    canvas.polyline(os, pts, "#9aa0a6", 1.5, 0.8);
  }

  for (const AgentTrack& nb : scene.neighbors)
    canvas.polyline(os, track_points(nb.history), "#7a6ea8", 1.5, 0.8);

  if (modes) {
    for (std::size_t m = 0; m < modes->modes.size(); ++m) {
      const ModeTrajectory& mt = modes->modes[m];
      std::vector<std::array<double, 2>> pts;
      for (const Point2& p : mt.points) pts.push_back({p[0], p[1]});
      double opacity = 0.25 + 0.75 * mt.prob;
      canvas.polyline(os, pts, "#d93025", 2.0, opacity);
      if (!pts.empty()) {
        std::ostringstream label;
        label.precision(2);
        label << std::fixed << mt.prob;
        canvas.text(os, pts.back()[0], pts.back()[1], label.str(), "#d93025");
      }
    }
  }

  canvas.polyline(os, track_points(scene.target.future), "#188038", 2.0, 0.9);
  canvas.polyline(os, track_points(scene.target.history), "#1a73e8", 2.5, 1.0);
  if (!scene.target.history.empty() && scene.target.current_state().valid) {
    const AgentState& cur = scene.target.current_state();
    canvas.circle(os, cur.x, cur.y, 4.0, "#1a73e8");
  }
  canvas.text(os, b.min_x, b.max_y, scene.scene_id, "#202124");

  os << "</svg>\n";
  return os.str();
}

}  // namespace trajcast

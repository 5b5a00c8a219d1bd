#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plankforge/geometry.hpp"

namespace plankforge {

enum class View : std::uint8_t { Front = 0, Top = 1, Side = 2 };
inline constexpr std::array<View, 3> kViews = {View::Front, View::Top, View::Side};

std::string_view view_name(View v);

/// Axis mapping of a view. Front: (u,v) = (x,z) seen along +y. Top: (x,y)
/// seen along -z. Side: (y,z) seen along -x.
struct ViewAxes {
  Axis u;
  Axis v;
  Axis depth;
  bool near_is_min;  ///< true if smaller depth coordinates are nearer the viewer
};
ViewAxes view_axes(View v);

/// Depth key along the view direction; smaller is nearer.
double depth_key(View v, double depth_coordinate);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Drawing segment. `p1` precedes `p2` by (x, then y).
struct Edge2D {
  Point2 p1;
  Point2 p2;
  bool visible = true;

  static Edge2D make(Point2 a, Point2 b, bool visible);
  double length() const;
  bool horizontal() const { return p1.y == p2.y; }
  friend bool operator==(const Edge2D&, const Edge2D&) = default;
};

struct ViewDrawing {
  View view = View::Front;
  std::vector<Edge2D> edges;
};

struct DrawingSet {
  std::array<ViewDrawing, 3> views{ViewDrawing{View::Front, {}}, ViewDrawing{View::Top, {}},
                                   ViewDrawing{View::Side, {}}};
  double scale_mm_per_unit = 1000.0;

  ViewDrawing& operator[](View v) { return views[static_cast<int>(v)]; }
  const ViewDrawing& operator[](View v) const { return views[static_cast<int>(v)]; }
};

/// Snapping tolerance for arrangement events, in normalized units.
inline constexpr double kArrangementTol = 1e-9;

/// Exact three-view line drawing of an assembly of cuboids, with visible and
/// hidden edges separated and collinear pieces merged.
DrawingSet project(std::span<const Box> planks, double scale_mm_per_unit = 1000.0);

/// Arrangement-normalize an arbitrary set of segments: split at every
/// intersection, let visible win over hidden, merge collinear runs. Edges that
/// are not axis-aligned are passed through unchanged.
std::vector<Edge2D> normalize_edges(std::span<const Edge2D> edges, double tol = kArrangementTol);
DrawingSet normalize(const DrawingSet& d, double tol = kArrangementTol);

/// Edges present in one drawing and not the other, after normalization.
std::size_t drawing_diff(const DrawingSet& a, const DrawingSet& b, double tol = 1e-7);

std::size_t count_edges(const DrawingSet& d);
std::size_t count_hidden(const DrawingSet& d);
double hidden_fraction(const DrawingSet& d);

/// Deterministic edge order: sorted by (x1, y1, x2, y2, visible).
void sort_edges(DrawingSet& d);

// drawing_io.cpp
std::string drawing_to_json(const DrawingSet& d);
DrawingSet drawing_from_json(std::string_view text);
DrawingSet load_drawing(const std::string& path);
void save_drawing(const DrawingSet& d, const std::string& path);
std::string drawing_to_svg(const DrawingSet& d);

}  // namespace plankforge

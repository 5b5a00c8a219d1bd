#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "plankforge/errors.hpp"
#include "plankforge/projector.hpp"

namespace plankforge {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 3> kAxisNames = {"x", "y", "z"};

View view_from_name(const std::string& s) {
  for (View v : kViews) {
    if (view_name(v) == s) return v;
  }
  throw Error("unknown view name '" + s + "'");
}

}  // namespace

std::string drawing_to_json(const DrawingSet& d) {
  json views = json::array();
  for (View v : kViews) {
    const ViewAxes ax = view_axes(v);
    json edges = json::array();
    for (const Edge2D& e : d[v].edges) {
      edges.push_back({{"x1", e.p1.x}, {"y1", e.p1.y}, {"x2", e.p2.x}, {"y2", e.p2.y},
                       {"visible", e.visible}});
    }
    const std::string depth = std::string(ax.near_is_min ? "+" : "-") +
                              std::string(kAxisNames[index_of(ax.depth)]);
    views.push_back({{"name", view_name(v)},
                     {"u", kAxisNames[index_of(ax.u)]},
                     {"v", kAxisNames[index_of(ax.v)]},
                     {"direction", depth},
                     {"edges", edges}});
  }
  return json{{"views", views}, {"scale_mm_per_unit", d.scale_mm_per_unit}}.dump();
}

DrawingSet drawing_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    DrawingSet d;
    d.scale_mm_per_unit = j.value("scale_mm_per_unit", 1000.0);
    for (const auto& jv : j.at("views")) {
      const View v = view_from_name(jv.at("name").get<std::string>());
      if (jv.contains("u")) {
        const ViewAxes ax = view_axes(v);
        if (jv.at("u").get<std::string>() != kAxisNames[index_of(ax.u)] ||
            jv.at("v").get<std::string>() != kAxisNames[index_of(ax.v)]) {
          throw Error("view '" + std::string(view_name(v)) + "' uses an unsupported axis mapping");
        }
      }
      auto& edges = d[v].edges;
      edges.clear();
      for (const auto& je : jv.at("edges")) {
        edges.push_back(Edge2D::make({je.at("x1").get<double>(), je.at("y1").get<double>()},
                                     {je.at("x2").get<double>(), je.at("y2").get<double>()},
                                     je.value("visible", true)));
      }
    }
    return d;
  } catch (const json::exception& e) {
    throw Error(std::string("drawing JSON: ") + e.what());
  }
}

DrawingSet load_drawing(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return drawing_from_json(ss.str());
}

void save_drawing(const DrawingSet& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << drawing_to_json(d) << '\n';
}

std::string drawing_to_svg(const DrawingSet& d) {
  // Views side by side, 1 unit = 1 normalized coordinate, y flipped.
  struct Bounds {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  };
  std::array<Bounds, 3> bounds;
  for (View v : kViews) {
    auto& b = bounds[static_cast<int>(v)];
    for (const Edge2D& e : d[v].edges) {
      b.x0 = std::min({b.x0, e.p1.x, e.p2.x});
      b.x1 = std::max({b.x1, e.p1.x, e.p2.x});
      b.y0 = std::min({b.y0, e.p1.y, e.p2.y});
      b.y1 = std::max({b.y1, e.p1.y, e.p2.y});
    }
    if (b.x0 > b.x1) b = Bounds{0, 0, 0, 0};
  }
  const double gap = 0.2;
  double width = gap, height = 0.0;
  for (const auto& b : bounds) {
    width += (b.x1 - b.x0) + gap;
    height = std::max(height, b.y1 - b.y0);
  }
  height += 2 * gap;

  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %.6f %.6f\">\n", width,
                height);
  out << buf;
  double offset = gap;
  for (View v : kViews) {
    const auto& b = bounds[static_cast<int>(v)];
    out << "<g id=\"" << view_name(v) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.004\">\n";
    for (const Edge2D& e : d[v].edges) {
      std::snprintf(buf, sizeof buf, "<line x1=\"%.6f\" y1=\"%.6f\" x2=\"%.6f\" y2=\"%.6f\"%s/>\n",
                    offset + e.p1.x - b.x0, gap + b.y1 - e.p1.y, offset + e.p2.x - b.x0,
                    gap + b.y1 - e.p2.y, e.visible ? "" : " stroke-dasharray=\"0.02,0.015\"");
      out << buf;
    }
    out << "</g>\n";
    offset += (b.x1 - b.x0) + gap;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace plankforge

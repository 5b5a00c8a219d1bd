#include "plankforge/projector.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>

namespace plankforge {

std::string_view view_name(View v) {
  switch (v) {
    case View::Front: return "front";
    case View::Top: return "top";
    case View::Side: return "side";
  }
  return "?";
}

ViewAxes view_axes(View v) {
  switch (v) {
    case View::Front: return {Axis::X, Axis::Z, Axis::Y, true};
    case View::Top: return {Axis::X, Axis::Y, Axis::Z, false};
    case View::Side: return {Axis::Y, Axis::Z, Axis::X, false};
  }
  return {Axis::X, Axis::Z, Axis::Y, true};
}

double depth_key(View v, double depth_coordinate) {
  return view_axes(v).near_is_min ? depth_coordinate : -depth_coordinate;
}

Edge2D Edge2D::make(Point2 a, Point2 b, bool visible) {
  if (std::tie(b.x, b.y) < std::tie(a.x, a.y)) std::swap(a, b);
  return Edge2D{a, b, visible};
}

double Edge2D::length() const { return std::hypot(p2.x - p1.x, p2.y - p1.y); }

namespace {

/// One axis-aligned input segment on a drawing line.
struct LineSeg {
  bool horizontal;
  double c;     // fixed coordinate (y for horizontal, x for vertical)
  double a, b;  // a <= b along the free coordinate
  int source;   // caller-defined contributor id
};

using VisibilityFn = std::function<bool(int source, double mu, double mv)>;

// Sorted values collapsed to one representative per tolerance cluster.
std::vector<double> cluster(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double v : values) {
    if (out.empty() || v - out.back() > tol) out.push_back(v);
  }
  return out;
}

std::vector<Edge2D> arrange(std::vector<LineSeg> segs, const VisibilityFn& visible_at, double tol) {
  std::sort(segs.begin(), segs.end(), [](const LineSeg& l, const LineSeg& r) {
    return std::tie(l.horizontal, l.c, l.a) < std::tie(r.horizontal, r.c, r.a);
  });

  std::vector<Edge2D> out;
  std::size_t i = 0;
  while (i < segs.size()) {
    // gather one line
    std::size_t j = i;
    while (j < segs.size() && segs[j].horizontal == segs[i].horizontal &&
           segs[j].c - segs[i].c <= tol) {
      ++j;
    }
    const bool horizontal = segs[i].horizontal;
    const double c = segs[i].c;
    double lo = segs[i].a, hi = segs[i].b;
    std::vector<double> breaks;
    for (std::size_t k = i; k < j; ++k) {
      breaks.push_back(segs[k].a);
      breaks.push_back(segs[k].b);
      lo = std::min(lo, segs[k].a);
      hi = std::max(hi, segs[k].b);
    }
    for (const LineSeg& p : segs) {
      if (p.horizontal == horizontal) continue;
      if (p.c < lo - tol || p.c > hi + tol) continue;
      if (p.a <= c + tol && p.b >= c - tol) breaks.push_back(p.c);
    }
    breaks = cluster(std::move(breaks), tol);

    bool open = false;
    Edge2D cur;
    double cur_end = 0.0;
    for (std::size_t t = 0; t + 1 < breaks.size(); ++t) {
      const double t0 = breaks[t], t1 = breaks[t + 1];
      const double mid = 0.5 * (t0 + t1);
      bool covered = false, vis = false;
      for (std::size_t k = i; k < j; ++k) {
        if (segs[k].a <= t0 + tol && segs[k].b >= t1 - tol) {
          covered = true;
          const double mu = horizontal ? mid : c;
          const double mv = horizontal ? c : mid;
          if (visible_at(segs[k].source, mu, mv)) {
            vis = true;
            break;
          }
        }
      }
      if (!covered) {
        if (open) out.push_back(cur);
        open = false;
        continue;
      }
      if (open && cur.visible == vis && cur_end == t0) {
        cur_end = t1;
        (horizontal ? cur.p2.x : cur.p2.y) = t1;
        continue;
      }
      if (open) out.push_back(cur);
      cur = horizontal ? Edge2D{{t0, c}, {t1, c}, vis} : Edge2D{{c, t0}, {c, t1}, vis};
      cur_end = t1;
      open = true;
    }
    if (open) out.push_back(cur);
    i = j;
  }
  return out;
}

}  // namespace

DrawingSet project(std::span<const Box> planks, double scale_mm_per_unit) {
  DrawingSet d;
  d.scale_mm_per_unit = scale_mm_per_unit;
  const double tol = kArrangementTol;

  for (View view : kViews) {
    const ViewAxes ax = view_axes(view);
    const int u = index_of(ax.u), v = index_of(ax.v), w = index_of(ax.depth);

    struct Footprint {
      double u0, u1, v0, v1, near_key;
    };
    std::vector<Footprint> prints;
    std::vector<double> seg_depth;
    std::vector<LineSeg> segs;
    for (const Box& b : planks) {
      const double k_lo = depth_key(view, b.lo[w]);
      const double k_hi = depth_key(view, b.hi[w]);
      prints.push_back({b.lo[u], b.hi[u], b.lo[v], b.hi[v], std::min(k_lo, k_hi)});
      // The 8 cuboid edges not parallel to the depth axis: each rectangle
      // side appears once on the near face and once on the far face.
      for (double key : {k_lo, k_hi}) {
        for (double vc : {b.lo[v], b.hi[v]}) {
          segs.push_back({true, vc, b.lo[u], b.hi[u], static_cast<int>(seg_depth.size())});
          seg_depth.push_back(key);
        }
        for (double uc : {b.lo[u], b.hi[u]}) {
          segs.push_back({false, uc, b.lo[v], b.hi[v], static_cast<int>(seg_depth.size())});
          seg_depth.push_back(key);
        }
      }
    }

    auto visible_at = [&](int source, double mu, double mv) {
      const double depth = seg_depth[source];
      for (const Footprint& f : prints) {
        if (f.near_key < depth - tol && mu > f.u0 + tol && mu < f.u1 - tol && mv > f.v0 + tol &&
            mv < f.v1 - tol) {
          return false;
        }
      }
      return true;
    };
    d[view].edges = arrange(std::move(segs), visible_at, tol);
  }
  sort_edges(d);
  return d;
}

std::vector<Edge2D> normalize_edges(std::span<const Edge2D> edges, double tol) {
  std::vector<LineSeg> segs;
  std::vector<Edge2D> passthrough;
  std::vector<bool> vis;
  for (const Edge2D& raw : edges) {
    const Edge2D e = Edge2D::make(raw.p1, raw.p2, raw.visible);
    const bool horiz = std::abs(e.p1.y - e.p2.y) <= tol;
    const bool vert = std::abs(e.p1.x - e.p2.x) <= tol;
    if (horiz && vert) continue;  // degenerate
    if (!horiz && !vert) {
      passthrough.push_back(e);
      continue;
    }
    const int src = static_cast<int>(vis.size());
    vis.push_back(e.visible);
    if (horiz) {
      segs.push_back({true, e.p1.y, e.p1.x, e.p2.x, src});
    } else {
      segs.push_back({false, e.p1.x, e.p1.y, e.p2.y, src});
    }
  }
  auto out = arrange(std::move(segs), [&](int s, double, double) { return bool(vis[s]); }, tol);
  out.insert(out.end(), passthrough.begin(), passthrough.end());
  return out;
}

DrawingSet normalize(const DrawingSet& d, double tol) {
  DrawingSet out;
  out.scale_mm_per_unit = d.scale_mm_per_unit;
  for (View v : kViews) out[v].edges = normalize_edges(d[v].edges, tol);
  sort_edges(out);
  return out;
}

std::size_t drawing_diff(const DrawingSet& a, const DrawingSet& b, double tol) {
  const DrawingSet na = normalize(a), nb = normalize(b);
  auto close = [tol](const Edge2D& x, const Edge2D& y) {
    return x.visible == y.visible && std::abs(x.p1.x - y.p1.x) <= tol &&
           std::abs(x.p1.y - y.p1.y) <= tol && std::abs(x.p2.x - y.p2.x) <= tol &&
           std::abs(x.p2.y - y.p2.y) <= tol;
  };
  std::size_t diff = 0;
  for (View v : kViews) {
    const auto& ea = na[v].edges;
    const auto& eb = nb[v].edges;
    std::vector<bool> used(eb.size(), false);
    for (const Edge2D& x : ea) {
      bool found = false;
      for (std::size_t k = 0; k < eb.size(); ++k) {
        if (!used[k] && close(x, eb[k])) {
          used[k] = true;
          found = true;
          break;
        }
      }
      if (!found) ++diff;
    }
    diff += static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
  }
  return diff;
}

std::size_t count_edges(const DrawingSet& d) {
  std::size_t n = 0;
  for (const auto& v : d.views) n += v.edges.size();
  return n;
}

std::size_t count_hidden(const DrawingSet& d) {
  std::size_t n = 0;
  for (const auto& v : d.views) {
    n += static_cast<std::size_t>(
        std::count_if(v.edges.begin(), v.edges.end(), [](const Edge2D& e) { return !e.visible; }));
  }
  return n;
}

double hidden_fraction(const DrawingSet& d) {
  const std::size_t n = count_edges(d);
  return n == 0 ? 0.0 : static_cast<double>(count_hidden(d)) / static_cast<double>(n);
}

void sort_edges(DrawingSet& d) {
  for (auto& v : d.views) {
    std::sort(v.edges.begin(), v.edges.end(), [](const Edge2D& a, const Edge2D& b) {
      return std::tie(a.p1.x, a.p1.y, a.p2.x, a.p2.y, a.visible) <
             std::tie(b.p1.x, b.p1.y, b.p2.x, b.p2.y, b.visible);
    });
  }
}

}  // namespace plankforge

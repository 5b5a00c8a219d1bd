#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "plankforge/projector.hpp"

using namespace plankforge;

namespace {

const Box kUnit{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};

// Check every atomic piece of every drawn edge against the ray-casting oracle.
void check_visibility(std::span<const Box> boxes, const DrawingSet& d) {
  for (View v : kViews) {
    const ViewAxes ax = view_axes(v);
    const auto segs = oracles::raw_segments(boxes, v);
    std::vector<double> cuts_u, cuts_v;
    for (const Box& b : boxes) {
      cuts_u.push_back(b.lo[index_of(ax.u)]);
      cuts_u.push_back(b.hi[index_of(ax.u)]);
      cuts_v.push_back(b.lo[index_of(ax.v)]);
      cuts_v.push_back(b.hi[index_of(ax.v)]);
    }
    cuts_u = oracles::distinct(cuts_u);
    cuts_v = oracles::distinct(cuts_v);
    for (const Edge2D& e : d[v].edges) {
      const bool h = e.horizontal();
      const double f = h ? e.p1.y : e.p1.x;
      const double a = h ? e.p1.x : e.p1.y;
      const double b = h ? e.p2.x : e.p2.y;
      const auto& cuts = h ? cuts_u : cuts_v;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        if (cuts[k] < a - 1e-9 || cuts[k + 1] > b + 1e-9) continue;
        const int vis = oracles::visibility_at(boxes, segs, v, h, f, 0.5 * (cuts[k] + cuts[k + 1]));
        CHECK(vis == (e.visible ? 1 : 0));
      }
    }
  }
}

std::vector<Box> random_assembly(Rng& rng) {
  std::vector<Box> boxes;
  const auto n = rng.uniform_int(1, 6);
  for (int i = 0; i < n; ++i) boxes.push_back(fixtures::random_grid_box(rng, 8, 0.25));
  return boxes;
}

}  // namespace

TEST_CASE("single cuboid") {
  const std::vector<Box> one{kUnit};
  const DrawingSet d = project(one);
  for (View v : kViews) {
    REQUIRE(d[v].edges.size() == 4);
    for (const Edge2D& e : d[v].edges) {
      CHECK(e.visible);
      CHECK(e.length() == doctest::Approx(1.0));
    }
  }
  CHECK(count_edges(d) == 12);
  CHECK(count_hidden(d) == 0);
  CHECK(hidden_fraction(d) == 0.0);
  CHECK(count_edges(project(std::vector<Box>{})) == 0);
}

TEST_CASE("view mapping") {
  CHECK(view_axes(View::Front).u == Axis::X);
  CHECK(view_axes(View::Front).v == Axis::Z);
  CHECK(view_axes(View::Top).v == Axis::Y);
  CHECK(view_axes(View::Side).u == Axis::Y);
  // front: smaller y is nearer; top: larger z; side: larger x
  CHECK(depth_key(View::Front, -1.0) < depth_key(View::Front, 1.0));
  CHECK(depth_key(View::Top, 1.0) < depth_key(View::Top, -1.0));
  CHECK(depth_key(View::Side, 1.0) < depth_key(View::Side, -1.0));
}

TEST_CASE("occluded silhouette is hidden") {
  // long flat A behind the narrower, taller B
  const Box a{{-1, 0.5, -0.2}, {1, 1, 0.2}};
  const Box b{{-0.5, -1, -1}, {0.5, 0, 1}};
  const std::vector<Box> boxes{a, b};
  const DrawingSet d = project(boxes);
  bool found = false;
  for (const Edge2D& e : d[View::Front].edges) {
    if (!e.visible && e.horizontal() && e.p1.y == 0.2 && e.p1.x == -0.5 && e.p2.x == 0.5) found = true;
  }
  CHECK(found);
  check_visibility(boxes, d);
}

TEST_CASE("enclosed cuboid") {
  // a closed hollow shell of six panels around a small cube
  const double t = 0.1;
  std::vector<Box> shell{
      {{-1, -1, -1}, {-1 + t, 1, 1}}, {{1 - t, -1, -1}, {1, 1, 1}},
      {{-1 + t, -1, -1}, {1 - t, -1 + t, 1}}, {{-1 + t, 1 - t, -1}, {1 - t, 1, 1}},
      {{-1 + t, -1 + t, -1}, {1 - t, 1 - t, -1 + t}}, {{-1 + t, -1 + t, 1 - t}, {1 - t, 1 - t, 1}},
      {{-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3}},
  };
  const DrawingSet d = project(shell);
  CHECK(hidden_fraction(d) > 0.0);
  check_visibility(shell, d);
}

TEST_CASE("listing drawing") {
  const auto boxes = resolve(fixtures::listing());
  const DrawingSet d = project(boxes);
  std::size_t total = 0, hidden = 0;
  for (View v : kViews) {
    std::size_t h = 0;
    const std::size_t n = oracles::arrangement_count(boxes, v, &h);
    CHECK(d[v].edges.size() == n);
    total += n;
    hidden += h;
  }
  CHECK(count_edges(d) == total);
  CHECK(count_hidden(d) == hidden);
  CHECK(hidden > 0);
  check_visibility(boxes, d);
}

TEST_CASE("arrangement invariants on random assemblies") {
  Rng rng(21);
  for (int it = 0; it < 150; ++it) {
    const auto boxes = random_assembly(rng);
    const DrawingSet d = project(boxes);
    CHECK(oracles::view_consistent(d));
    CHECK(oracles::length_conserved(boxes, d));
    for (View v : kViews) {
      CHECK(d[v].edges.size() == oracles::arrangement_count(boxes, v));
      for (const Edge2D& e : d[v].edges) {
        CHECK((e.p1.x == e.p2.x || e.p1.y == e.p2.y));
        CHECK((e.p1.x < e.p2.x || (e.p1.x == e.p2.x && e.p1.y < e.p2.y)));
      }
    }
    check_visibility(boxes, d);
    // running the arrangement again changes nothing
    DrawingSet again = normalize(d);
    DrawingSet sorted = d;
    sort_edges(again);
    sort_edges(sorted);
    for (View v : kViews) CHECK(again[v].edges == sorted[v].edges);
    CHECK(drawing_diff(d, again) == 0);
  }
}

TEST_CASE("generated cabinets") {
  for (const Program& p : fixtures::cabinets(40, 22)) {
    const auto boxes = resolve(p);
    const DrawingSet d = project(boxes, p.scale_mm_per_unit);
    CHECK(d.scale_mm_per_unit == p.scale_mm_per_unit);
    CHECK(oracles::view_consistent(d));
    CHECK(oracles::length_conserved(boxes, d));
    for (View v : kViews) CHECK(d[v].edges.size() == oracles::arrangement_count(boxes, v));
  }
}

TEST_CASE("visible wins over hidden") {
  // two coincident segments, one of each kind, plus an overlapping tail
  const std::vector<Edge2D> in{
      Edge2D::make({0, 0}, {1, 0}, false),
      Edge2D::make({0, 0}, {1, 0}, true),
      Edge2D::make({0.5, 0}, {2, 0}, false),
  };
  auto out = normalize_edges(in);
  std::sort(out.begin(), out.end(), [](const Edge2D& a, const Edge2D& b) { return a.p1.x < b.p1.x; });
  REQUIRE(out.size() == 2);
  CHECK(out[0] == Edge2D::make({0, 0}, {1, 0}, true));
  CHECK(out[1] == Edge2D::make({1, 0}, {2, 0}, false));
}

TEST_CASE("edge endpoint order") {
  const Edge2D e = Edge2D::make({1, 0}, {0, 0}, true);
  CHECK(e.p1 == Point2{0, 0});
  const Edge2D f = Edge2D::make({0, 2}, {0, 1}, false);
  CHECK(f.p1 == Point2{0, 1});
}

TEST_CASE("drawing json round trip") {
  const DrawingSet d = project(resolve(fixtures::listing()), 2000.0);
  const DrawingSet back = drawing_from_json(drawing_to_json(d));
  CHECK(back.scale_mm_per_unit == 2000.0);
  for (View v : kViews) CHECK(back[v].edges == d[v].edges);
  CHECK(drawing_to_svg(d).find("<svg") != std::string::npos);
}

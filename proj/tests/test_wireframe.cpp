#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "fixtures.hpp"
#include "plankforge/errors.hpp"
#include "plankforge/wireframe.hpp"

using namespace plankforge;

namespace {

const Box kUnit{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};

struct Stages {
  std::vector<CandidateVertex> vs;
  std::vector<CandidateEdge> es;
  std::vector<CandidateFace> fs;
  std::vector<CandidateBlock> bs;
};

Stages run_stages(const DrawingSet& d) {
  const DrawingIndex idx(d);
  Stages s;
  s.vs = gen_vertices(idx);
  s.es = gen_edges(idx, s.vs);
  s.fs = gen_faces(idx, s.vs, s.es);
  s.bs = gen_blocks(idx, s.fs);
  return s;
}

DrawingSet draw(std::vector<Box> boxes) { return project(boxes); }

// 2D nodes of a view computed straight from the edge list: endpoints plus
// every crossing or touching of a horizontal and a vertical edge.
std::set<std::pair<long long, long long>> view_nodes(const ViewDrawing& vd) {
  auto key = [](double a, double b) { return std::pair{std::llround(a * 1e6), std::llround(b * 1e6)}; };
  std::set<std::pair<long long, long long>> out;
  for (const Edge2D& e : vd.edges) {
    out.insert(key(e.p1.x, e.p1.y));
    out.insert(key(e.p2.x, e.p2.y));
  }
  for (const Edge2D& h : vd.edges) {
    if (!h.horizontal()) continue;
    for (const Edge2D& v : vd.edges) {
      if (v.horizontal()) continue;
      if (v.p1.x >= h.p1.x && v.p1.x <= h.p2.x && h.p1.y >= v.p1.y && h.p1.y <= v.p2.y) out.insert(key(v.p1.x, h.p1.y));
    }
  }
  return out;
}

std::size_t cross_product_vertices(const DrawingSet& d) {
  const auto f = view_nodes(d[View::Front]);
  const auto t = view_nodes(d[View::Top]);
  const auto s = view_nodes(d[View::Side]);
  std::size_t n = 0;
  for (const auto& [x, z] : f) {
    for (const auto& [tx, y] : t) {
      if (tx == x && s.count({y, z})) ++n;
    }
  }
  return n;
}

CandidateBlock block_of(const Box& b) {
  CandidateBlock c;
  c.cell_boxes = {b};
  c.aabb = b;
  c.volume = b.volume();
  return c;
}

std::vector<Box> sorted(std::vector<Box> v) {
  std::sort(v.begin(), v.end(), [](const Box& a, const Box& b) { return a.dofs() < b.dofs(); });
  return v;
}

bool near_box(const Box& a, const Box& b, double tol = 1e-9) {
  for (int i = 0; i < 6; ++i) {
    if (std::abs(a.dofs()[i] - b.dofs()[i]) > tol) return false;
  }
  return true;
}

DrawingSet without_edge(const DrawingSet& d, View v, std::size_t i) {
  DrawingSet out = d;
  out[v].edges.erase(out[v].edges.begin() + static_cast<long>(i));
  return out;
}

}  // namespace

TEST_CASE("single cuboid") {
  const DrawingSet d = draw({kUnit});
  const Stages s = run_stages(d);
  CHECK(s.vs.size() == 8);
  CHECK(s.es.size() == 12);
  CHECK(s.fs.size() == 6);
  REQUIRE(s.bs.size() == 1);
  CHECK(s.bs[0].is_box());
  CHECK(near_box(s.bs[0].aabb, kUnit));

  const ReconResult r = reconstruct(d, ReconVariant::Verify);
  CHECK(r.solution.status == SolutionStatus::Verified);
  CHECK(r.solution.chosen == std::vector<int>{0});
  const ReconResult u = reconstruct(d, ReconVariant::Union);
  CHECK(u.solution.status == SolutionStatus::UnionFallback);
  CHECK(u.solution.chosen == r.solution.chosen);
  CHECK(reprojection_diff(r.solution, d) == std::optional<std::size_t>{0});
}

TEST_CASE("empty front view") {
  DrawingSet d = draw({kUnit});
  d[View::Front].edges.clear();
  const Stages s = run_stages(d);
  CHECK(s.vs.empty());
  CHECK(s.bs.empty());
  CHECK(reconstruct(d, ReconVariant::Verify).solution.status == SolutionStatus::NoMatch);
}

TEST_CASE("vertices match the node cross product") {
  const DrawingSet d = project(resolve(fixtures::listing()));
  CHECK(run_stages(d).vs.size() == cross_product_vertices(d));
  for (const Program& p : fixtures::cabinets(20, 51)) {
    const DrawingSet g = project(resolve(p));
    CHECK(run_stages(g).vs.size() == cross_product_vertices(g));
  }
}

TEST_CASE("two disjoint cuboids") {
  const Box a{{-1, -1, -1}, {-0.5, -0.5, -0.5}};
  const Box b{{0.5, 0.5, 0.5}, {1, 1, 1}};
  const Stages s = run_stages(draw({a, b}));
  CHECK(s.vs.size() == 16);
  CHECK(s.es.size() == 24);
  CHECK(s.fs.size() == 12);
  CHECK(s.bs.size() == 2);
}

TEST_CASE("window pane") {
  // 2x2 slab: the front plane carries a cross of 12 unit edges
  std::vector<Box> quads;
  for (double x0 : {-1.0, 0.0}) {
    for (double z0 : {-1.0, 0.0}) quads.push_back({{x0, -0.5, z0}, {x0 + 1, 0.5, z0 + 1}});
  }
  const DrawingSet d = draw(quads);
  const Stages s = run_stages(d);
  std::size_t front_faces = 0;
  for (const CandidateFace& f : s.fs) {
    if (f.normal == Axis::Y && std::abs(f.offset_value + 0.5) < 1e-9) {
      ++front_faces;
      CHECK(f.cells.size() == 1);
      CHECK(f.boundary_edges.size() == 4);
    }
  }
  CHECK(front_faces == 4);
  CHECK(s.bs.size() == 4);

  const ReconResult r = reconstruct(d, ReconVariant::Verify);
  CHECK(r.solution.status == SolutionStatus::Verified);
  CHECK(r.solution.chosen.size() == 4);
}

TEST_CASE("faces need closed loops") {
  // an L of two edges in the front view plane closes nothing
  DrawingSet d;
  d[View::Front].edges = {Edge2D::make({0, 0}, {1, 0}, true), Edge2D::make({0, 0}, {0, 1}, true)};
  d[View::Top].edges = {Edge2D::make({0, 0}, {1, 0}, true), Edge2D::make({0, 0}, {0, 1}, true)};
  d[View::Side].edges = {Edge2D::make({0, 0}, {1, 0}, true), Edge2D::make({0, 0}, {0, 1}, true)};
  const Stages s = run_stages(d);
  CHECK(s.fs.empty());
  CHECK(s.bs.empty());
}

TEST_CASE("blocks tile the planks of clean cabinets") {
  for (const Program& p : fixtures::cabinets(30, 52)) {
    const auto gt = resolve(p);
    const Stages s = run_stages(project(gt));
    std::vector<double> covered(gt.size(), 0.0);
    for (const CandidateBlock& b : s.bs) {
      CHECK(b.volume > 0.0);
      int inside = 0;
      for (std::size_t g = 0; g < gt.size(); ++g) {
        double ov = 0.0;
        for (const Box& c : b.cell_boxes) ov += intersection_volume(c, gt[g]);
        if (ov > 0.0) {
          ++inside;
          CHECK(ov == doctest::Approx(b.volume).epsilon(1e-9));
          covered[g] += ov;
        }
      }
      CHECK(inside <= 1);
    }
    for (std::size_t g = 0; g < gt.size(); ++g) CHECK(covered[g] == doctest::Approx(gt[g].volume()).epsilon(1e-9));
  }
}

TEST_CASE("clean cabinets verify exactly") {
  for (const Program& p : fixtures::cabinets(15, 53)) {
    const auto gt = resolve(p);
    const DrawingSet d = project(gt, p.scale_mm_per_unit);
    SearchOptions o;
    o.timeout = std::chrono::seconds(60);
    const ReconResult r = reconstruct(d, ReconVariant::Verify, o);
    REQUIRE(r.solution.status == SolutionStatus::Verified);
    CHECK(reprojection_diff(r.solution, d) == std::optional<std::size_t>{0});
    const auto pred = group_blocks(r.solution, gt);
    REQUIRE(pred.size() == gt.size());
    const auto a = sorted(pred), b = sorted(gt);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(near_box(a[i], b[i], 1e-6));

    // the separate-solid raster of the chosen blocks equals the input raster
    const DrawingIndex idx(d);
    for (View v : kViews) CHECK(block_raster(idx, r.solution.blocks, v).state == idx.raster(v).state);
  }
}

TEST_CASE("sampled solution is still exact") {
  const Program p = fixtures::cabinets(1, 54)[0];
  const DrawingSet d = project(resolve(p));
  SearchOptions o;
  o.sample_seed = 7;
  const ReconResult a = reconstruct(d, ReconVariant::Verify, o);
  const ReconResult b = reconstruct(d, ReconVariant::Verify, o);
  CHECK(a.solution.status == SolutionStatus::Verified);
  CHECK(a.solution.chosen == b.solution.chosen);
  CHECK(reprojection_diff(a.solution, d) == std::optional<std::size_t>{0});
}

TEST_CASE("deleted edge breaks verification") {
  const DrawingSet one = draw({kUnit});
  for (View v : kViews) {
    for (std::size_t i = 0; i < one[v].edges.size(); ++i) {
      CHECK(reconstruct(without_edge(one, v, i), ReconVariant::Verify).solution.status == SolutionStatus::NoMatch);
    }
  }
  const DrawingSet d = project(resolve(fixtures::listing()));
  const std::size_t clean_blocks = run_stages(d).bs.size();
  std::size_t redundant = 0, total = 0;
  for (View v : kViews) {
    for (std::size_t i = 0; i < d[v].edges.size(); ++i) {
      const DrawingSet noisy = without_edge(d, v, i);
      SearchOptions o;
      o.timeout = std::chrono::seconds(20);
      const ReconResult r = reconstruct(noisy, ReconVariant::Verify, o);
      CHECK(r.candidates.size() < clean_blocks);
      // a deletion can leave the exact drawing of some other assembly; only
      // then may the search succeed
      if (r.solution.status == SolutionStatus::Verified) {
        ++redundant;
        CHECK(reprojection_diff(r.solution, noisy) == std::optional<std::size_t>{0});
      } else {
        CHECK(r.solution.status == SolutionStatus::NoMatch);
      }
      ++total;
    }
  }
  CHECK(redundant * 10 < total);
}

TEST_CASE("timeout") {
  // 3x3x3 stack of touching cubes with a zero budget
  std::vector<Box> cubes;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        cubes.push_back({{-0.9 + 0.6 * i, -0.9 + 0.6 * j, -0.9 + 0.6 * k}, {-0.3 + 0.6 * i, -0.3 + 0.6 * j, -0.3 + 0.6 * k}});
      }
    }
  }
  SearchOptions o;
  o.timeout = std::chrono::milliseconds(0);
  const ReconResult r = reconstruct(draw(cubes), ReconVariant::Verify, o);
  CHECK(r.candidates.size() == 27);
  CHECK(r.solution.status == SolutionStatus::Timeout);
}

TEST_CASE("union variant") {
  const Program p = fixtures::listing();
  const DrawingSet d = project(resolve(p));
  const ReconResult u = reconstruct(d, ReconVariant::Union);
  CHECK(u.solution.status == SolutionStatus::UnionFallback);
  CHECK(u.solution.blocks.size() == u.candidates.size());
}

TEST_CASE("group blocks") {
  const Box a{{0, 0, 0}, {1, 1, 0.1}};
  const Box b{{0, 0, 0.5}, {1, 1, 0.6}};
  const std::vector<Box> gt{a, b};

  ReconSolution exact;
  exact.blocks = {block_of(a), block_of(b)};
  CHECK(group_blocks(exact, gt) == gt);

  ReconSolution split;
  split.blocks = {block_of({{0, 0, 0}, {0.5, 1, 0.1}}), block_of({{0.5, 0, 0}, {1, 1, 0.1}}), block_of(b)};
  CHECK(group_blocks(split, gt) == gt);

  const Box stray{{2, 2, 2}, {3, 3, 3}};
  ReconSolution extra = exact;
  extra.blocks.push_back(block_of(stray));
  const auto g = group_blocks(extra, gt);
  REQUIRE(g.size() == 3);
  CHECK(g[2] == stray);
}

TEST_CASE("solution json") {
  const DrawingSet d = project(resolve(fixtures::listing()));
  const ReconResult r = reconstruct(d, ReconVariant::Verify);
  const auto [status, boxes] = solution_from_json(solution_to_json(r.solution));
  CHECK(status == r.solution.status);
  REQUIRE(boxes.size() == r.solution.blocks.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) CHECK(boxes[i] == r.solution.blocks[i].aabb);
  CHECK_THROWS_AS(solution_from_json(R"({"status":"Maybe","blocks":[]})"), Error);
  CHECK(status_name(SolutionStatus::Timeout) == "Timeout");
}

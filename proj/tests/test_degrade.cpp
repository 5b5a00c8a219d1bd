#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "plankforge/degrade.hpp"
#include "plankforge/errors.hpp"

using namespace plankforge;

namespace {

// 20 unit-length horizontal edges in the front view, half of them hidden.
DrawingSet twenty() {
  DrawingSet d;
  for (int i = 0; i < 20; ++i) {
    d[View::Front].edges.push_back(Edge2D::make({0, 0.05 * i}, {1, 0.05 * i}, i % 2 == 0));
  }
  return d;
}

std::size_t untouched(const DrawingSet& in, const DrawingSet& out) {
  std::size_t n = 0;
  for (View v : kViews) {
    for (const Edge2D& e : in[v].edges) {
      if (std::find(out[v].edges.begin(), out[v].edges.end(), e) != out[v].edges.end()) ++n;
    }
  }
  return n;
}

bool same(const DrawingSet& a, const DrawingSet& b) {
  for (View v : kViews) {
    if (a[v].edges != b[v].edges) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("zero ratio is identity") {
  const DrawingSet d = project(resolve(fixtures::listing()));
  NoiseConfig c;
  c.seed = 3;
  CHECK(same(inject_noise(d, c), d));
}

TEST_CASE("full deletion empties the drawing") {
  const DrawingSet d = project(resolve(fixtures::listing()));
  NoiseConfig c;
  c.ratio = 1.0;
  c.delete_prob = 1.0;
  NoiseReport r;
  CHECK(count_edges(inject_noise(d, c, &r)) == 0);
  CHECK(r.deleted == count_edges(d));
}

TEST_CASE("ratio 0.3 on 20 edges affects 6") {
  const DrawingSet d = twenty();
  for (double del : {0.0, 0.5, 1.0}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      NoiseConfig c;
      c.ratio = 0.3;
      c.delete_prob = del;
      c.seed = seed;
      NoiseReport r;
      const DrawingSet out = inject_noise(d, c, &r);
      CHECK(r.selected == 6);
      CHECK(untouched(d, out) == 14);
      CHECK(r.deleted + r.perturbed + r.degenerate == 6);
      CHECK(count_edges(out) == 20 - r.deleted - r.degenerate);
      CHECK(same(inject_noise(d, c), out));
    }
  }
  NoiseConfig a, b;
  a.ratio = b.ratio = 0.3;
  a.seed = 1;
  b.seed = 2;
  CHECK_FALSE(same(inject_noise(d, a), inject_noise(d, b)));
}

TEST_CASE("perturbed edges slide along their line") {
  for (const Program& p : fixtures::cabinets(20, 31)) {
    const DrawingSet d = project(resolve(p));
    NoiseConfig c;
    c.ratio = 0.5;
    c.delete_prob = 0.0;
    c.max_shift_frac = 0.2;
    c.seed = 9;
    const DrawingSet out = inject_noise(d, c);
    for (View v : kViews) {
      for (const Edge2D& e : out[v].edges) {
        // some input edge on the same line with the same stroke, within the shift bound
        const bool ok = std::any_of(d[v].edges.begin(), d[v].edges.end(), [&](const Edge2D& o) {
          if (o.visible != e.visible || o.horizontal() != e.horizontal()) return false;
          const double bound = 0.2 * o.length() + 1e-12;
          if (o.horizontal()) {
            return o.p1.y == e.p1.y && e.p2.y == o.p1.y && std::abs(e.p1.x - o.p1.x) <= bound &&
                   std::abs(e.p2.x - o.p2.x) <= bound;
          }
          return o.p1.x == e.p1.x && e.p2.x == o.p1.x && std::abs(e.p1.y - o.p1.y) <= bound &&
                 std::abs(e.p2.y - o.p2.y) <= bound;
        });
        CHECK(ok);
      }
    }
  }
}

TEST_CASE("strip hidden") {
  const DrawingSet one = project(std::vector<Box>{Box{{0, 0, 0}, {1, 1, 1}}});
  CHECK(same(strip_hidden(one), one));
  const DrawingSet d = project(resolve(fixtures::listing()));
  const std::size_t h = count_hidden(d);
  CHECK(h > 0);
  CHECK(count_edges(strip_hidden(d)) == count_edges(d) - h);
  CHECK(count_hidden(strip_hidden(d)) == 0);
}

TEST_CASE("config checks") {
  NoiseConfig c;
  c.ratio = 1.5;
  CHECK_THROWS_AS(c.check(), Error);
  c.ratio = 0.1;
  c.delete_prob = -0.1;
  CHECK_THROWS_AS(c.check(), Error);
  c.delete_prob = 0.5;
  c.max_shift_frac = -1;
  CHECK_THROWS_AS(inject_noise(DrawingSet{}, c), Error);
}

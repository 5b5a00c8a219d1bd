#include "plankforge/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plankforge/errors.hpp"
#include "plankforge/rng.hpp"

namespace plankforge {

void NoiseConfig::check() const {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw Error("noise ratio must lie in [0,1]");
  if (!(delete_prob >= 0.0 && delete_prob <= 1.0)) throw Error("delete probability must lie in [0,1]");
  if (!(max_shift_frac >= 0.0)) throw Error("max shift fraction must be >= 0");
}

DrawingSet inject_noise(const DrawingSet& d, const NoiseConfig& c, NoiseReport* report) {
  c.check();
  const std::size_t total = count_edges(d);
  // guard ceil() against 0.3 * 20 = 6.000000000000001
  const auto wanted = static_cast<std::size_t>(std::ceil(c.ratio * static_cast<double>(total) - 1e-9));
  const std::size_t k = std::min(wanted, total);

  Rng rng(c.seed);
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                            static_cast<std::int64_t>(total) - 1));
    std::swap(idx[i], idx[j]);
  }
  std::vector<bool> selected(total, false);
  for (std::size_t i = 0; i < k; ++i) selected[idx[i]] = true;

  NoiseReport rep;
  rep.selected = k;
  DrawingSet out;
  out.scale_mm_per_unit = d.scale_mm_per_unit;
  std::size_t flat = 0;
  for (View v : kViews) {
    for (const Edge2D& e : d[v].edges) {
      if (!selected[flat++]) {
        out[v].edges.push_back(e);
        continue;
      }
      if (rng.bernoulli(c.delete_prob)) {
        ++rep.deleted;
        continue;
      }
      const double len = e.length();
      const double dx = (e.p2.x - e.p1.x) / len, dy = (e.p2.y - e.p1.y) / len;
      const double bound = c.max_shift_frac * len;
      const double s1 = rng.uniform(-bound, bound);
      const double s2 = rng.uniform(-bound, bound);
      const Point2 a{e.p1.x + s1 * dx, e.p1.y + s1 * dy};
      const Point2 b{e.p2.x + s2 * dx, e.p2.y + s2 * dy};
      if (len + s2 - s1 <= 0.0) {
        ++rep.degenerate;
        continue;
      }
      ++rep.perturbed;
      out[v].edges.push_back(Edge2D::make(a, b, e.visible));
    }
  }
  if (report) *report = rep;
  return out;
}

DrawingSet strip_hidden(const DrawingSet& d) {
  DrawingSet out;
  out.scale_mm_per_unit = d.scale_mm_per_unit;
  for (View v : kViews) {
    for (const Edge2D& e : d[v].edges) {
      if (e.visible) out[v].edges.push_back(e);
    }
  }
  return out;
}

}  // namespace plankforge

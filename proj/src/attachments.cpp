#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "plankforge/errors.hpp"
#include "plankforge/program.hpp"

namespace plankforge {

namespace {

struct Target {
  double distance = std::numeric_limits<double>::infinity();
  int plank = -1;  // -1 = bbox, otherwise input index
  Dof dof = Dof::XMin;
};

// Positive-area overlap of two faces normal to `normal`.
bool faces_overlap(const Box& a, const Box& b, Axis normal) {
  for (int ax = 0; ax < 3; ++ax) {
    if (ax == index_of(normal)) continue;
    if (std::min(a.hi[ax], b.hi[ax]) - std::max(a.lo[ax], b.lo[ax]) <= 0.0) return false;
  }
  return true;
}

std::vector<int> find_cycle(const std::vector<std::set<int>>& deps) {
  const int n = static_cast<int>(deps.size());
  std::vector<int> state(n, 0), parent(n, -1);
  std::vector<int> cycle;
  std::function<bool(int)> dfs = [&](int u) {
    state[u] = 1;
    for (int v : deps[u]) {
      if (state[v] == 1) {
        cycle.push_back(v);
        for (int w = u; w != v; w = parent[w]) cycle.push_back(w);
        std::reverse(cycle.begin(), cycle.end());
        return true;
      }
      if (state[v] == 0) {
        parent[v] = u;
        if (dfs(v)) return true;
      }
    }
    state[u] = 2;
    return false;
  };
  for (int i = 0; i < n; ++i) {
    if (state[i] == 0 && dfs(i)) break;
  }
  return cycle;
}

}  // namespace

Program infer_attachments(std::span<const Box> planks, const InferOptions& opts) {
  const int n = static_cast<int>(planks.size());
  Box bbox;
  if (opts.bbox) {
    bbox = *opts.bbox;
  } else if (n > 0) {
    bbox = planks[0];
    for (const Box& b : planks) bbox = bounding_union(bbox, b);
  }

  std::vector<std::array<Target, kDofCount>> chosen(n);
  std::vector<std::set<int>> deps(n);
  for (int i = 0; i < n; ++i) {
    const Box& a = planks[i];
    const Axis thick = thickness_axis(a);
    for (int d = 0; d < kDofCount; ++d) {
      const Dof dof = static_cast<Dof>(d);
      Target best;
      const double to_bbox = std::abs(a.dof(dof) - bbox.dof(dof));
      if (to_bbox <= opts.threshold) best = {to_bbox, -1, dof};

      // endface of `a` onto a sideface of `b`
      if (axis_of(dof) != thick) {
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          const Box& b = planks[j];
          if (thickness_axis(b) != axis_of(dof)) continue;
          const double dist = std::abs(a.dof(dof) - b.dof(opposite(dof)));
          if (dist > opts.threshold || !faces_overlap(a, b, axis_of(dof))) continue;
          if (dist < best.distance) best = {dist, j, opposite(dof)};
        }
      }
      chosen[i][d] = best;
      if (best.plank >= 0) deps[i].insert(best.plank);
    }
  }

  // Kahn's algorithm, lowest input index first among ready planks.
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> dependents(n);
  for (int i = 0; i < n; ++i) {
    indegree[i] = static_cast<int>(deps[i].size());
    for (int j : deps[i]) dependents[j].push_back(i);
  }
  std::set<int> ready;
  for (int i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  std::vector<int> order;
  while (!ready.empty()) {
    const int u = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(u);
    for (int v : dependents[u]) {
      if (--indegree[v] == 0) ready.insert(v);
    }
  }
  if (static_cast<int>(order.size()) != n) throw CyclicAttachmentError(find_cycle(deps));

  std::vector<int> position(n);
  for (int k = 0; k < n; ++k) position[order[k]] = k + 1;

  Program p;
  p.scale_mm_per_unit = opts.scale_mm_per_unit;
  p.cuboids.push_back(Cuboid::literal(bbox));
  for (int k = 0; k < n; ++k) {
    const int i = order[k];
    Cuboid c = Cuboid::literal(planks[i]);
    for (int d = 0; d < kDofCount; ++d) {
      const Target& t = chosen[i][d];
      if (std::isinf(t.distance)) continue;
      c.coords[d] = Attach{t.plank < 0 ? 0 : position[t.plank], t.dof};
    }
    p.cuboids.push_back(c);
  }
  return p;
}

}  // namespace plankforge

#include "plankforge/wireframe.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include <json.hpp>

#include "plankforge/errors.hpp"

namespace plankforge {

// ---------------------------------------------------------------------------
// Grid and rasters

int Grid::snap(Axis a, double v, double tol) const {
  const auto& vals = values[index_of(a)];
  auto it = std::upper_bound(vals.begin(), vals.end(), v + 1e-12);
  if (it == vals.begin()) return -1;
  const int idx = static_cast<int>(it - vals.begin()) - 1;
  return v - vals[idx] <= tol + 1e-12 ? idx : -1;
}

bool ViewRaster::h_covered(int v_line, int u0, int u1) const {
  for (int u = u0; u < u1; ++u) {
    if (state[h_unit(v_line, u)] == 0) return false;
  }
  return true;
}

bool ViewRaster::v_covered(int u_line, int v0, int v1) const {
  for (int v = v0; v < v1; ++v) {
    if (state[v_unit(u_line, v)] == 0) return false;
  }
  return true;
}

DrawingIndex::DrawingIndex(const DrawingSet& d, double snap_tol) : snap_tol_(snap_tol) {
  std::array<std::vector<double>, 3> raw;
  for (View v : kViews) {
    const ViewAxes ax = view_axes(v);
    for (const Edge2D& e : d[v].edges) {
      raw[index_of(ax.u)].push_back(e.p1.x);
      raw[index_of(ax.u)].push_back(e.p2.x);
      raw[index_of(ax.v)].push_back(e.p1.y);
      raw[index_of(ax.v)].push_back(e.p2.y);
    }
  }
  for (int a = 0; a < 3; ++a) {
    std::sort(raw[a].begin(), raw[a].end());
    for (double x : raw[a]) {
      if (grid_.values[a].empty() || x - grid_.values[a].back() > snap_tol) {
        grid_.values[a].push_back(x);
      }
    }
  }

  for (View v : kViews) {
    const ViewAxes ax = view_axes(v);
    ViewRaster& r = rasters_[static_cast<int>(v)];
    r.nu = grid_.size(ax.u);
    r.nv = grid_.size(ax.v);
    r.state.assign(std::max(0, r.unit_count()), 0);
    r.node.assign(static_cast<std::size_t>(r.nu) * r.nv, 0);

    struct Seg {
      int c, a, b;
    };
    std::vector<Seg> hs, vs;
    for (const Edge2D& e : d[v].edges) {
      const int u1 = grid_.snap(ax.u, e.p1.x, snap_tol), u2 = grid_.snap(ax.u, e.p2.x, snap_tol);
      const int v1 = grid_.snap(ax.v, e.p1.y, snap_tol), v2 = grid_.snap(ax.v, e.p2.y, snap_tol);
      const std::uint8_t s = e.visible ? 2 : 1;
      if ((u1 == u2) == (v1 == v2)) {
        ++skipped_;  // collapsed or diagonal
        continue;
      }
      if (v1 == v2) {
        const int a = std::min(u1, u2), b = std::max(u1, u2);
        for (int u = a; u < b; ++u) r.state[r.h_unit(v1, u)] = std::max(r.state[r.h_unit(v1, u)], s);
        hs.push_back({v1, a, b});
      } else {
        const int a = std::min(v1, v2), b = std::max(v1, v2);
        for (int w = a; w < b; ++w) r.state[r.v_unit(u1, w)] = std::max(r.state[r.v_unit(u1, w)], s);
        vs.push_back({u1, a, b});
      }
    }
    auto mark = [&](int ui, int vi) { r.node[static_cast<std::size_t>(ui) * r.nv + vi] = 1; };
    for (const Seg& h : hs) {
      mark(h.a, h.c);
      mark(h.b, h.c);
    }
    for (const Seg& s : vs) {
      mark(s.c, s.a);
      mark(s.c, s.b);
    }
    for (const Seg& h : hs) {
      for (const Seg& s : vs) {
        if (s.c >= h.a && s.c <= h.b && h.c >= s.a && h.c <= s.b) mark(s.c, h.c);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Vertices and edges

std::vector<CandidateVertex> gen_vertices(const DrawingIndex& d) {
  const Grid& g = d.grid();
  const ViewRaster& front = d.raster(View::Front);
  const ViewRaster& top = d.raster(View::Top);
  const ViewRaster& side = d.raster(View::Side);
  std::vector<CandidateVertex> out;
  for (int i = 0; i < g.size(Axis::X); ++i) {
    for (int k = 0; k < g.size(Axis::Z); ++k) {
      if (!front.is_node(i, k)) continue;
      for (int j = 0; j < g.size(Axis::Y); ++j) {
        if (top.is_node(i, j) && side.is_node(j, k)) {
          out.push_back({{i, j, k}, {g.at(Axis::X, i), g.at(Axis::Y, j), g.at(Axis::Z, k)}});
        }
      }
    }
  }
  return out;
}

std::vector<CandidateEdge> gen_edges(const DrawingIndex& d, std::span<const CandidateVertex> vs) {
  const Grid& g = d.grid();
  const int nx = g.size(Axis::X), ny = g.size(Axis::Y), nz = g.size(Axis::Z);
  std::vector<int> at(static_cast<std::size_t>(nx) * ny * nz, -1);
  auto cell = [&](int i, int j, int k) -> int& {
    return at[(static_cast<std::size_t>(i) * ny + j) * nz + k];
  };
  for (std::size_t n = 0; n < vs.size(); ++n) cell(vs[n].idx[0], vs[n].idx[1], vs[n].idx[2]) = static_cast<int>(n);

  const ViewRaster& front = d.raster(View::Front);
  const ViewRaster& top = d.raster(View::Top);
  const ViewRaster& side = d.raster(View::Side);
  std::vector<CandidateEdge> out;

  // Consecutive vertices on each axis-parallel line; longer spans would
  // contain a vertex and are never minimal.
  for (int j = 0; j < ny; ++j) {
    for (int k = 0; k < nz; ++k) {
      int prev = -1;
      for (int i = 0; i < nx; ++i) {
        const int v = cell(i, j, k);
        if (v < 0) continue;
        if (prev >= 0) {
          const int a = vs[prev].idx[0];
          if (front.h_covered(k, a, i) && top.h_covered(j, a, i)) out.push_back({prev, v, Axis::X});
        }
        prev = v;
      }
    }
  }
  for (int i = 0; i < nx; ++i) {
    for (int k = 0; k < nz; ++k) {
      int prev = -1;
      for (int j = 0; j < ny; ++j) {
        const int v = cell(i, j, k);
        if (v < 0) continue;
        if (prev >= 0) {
          const int a = vs[prev].idx[1];
          if (top.v_covered(i, a, j) && side.h_covered(k, a, j)) out.push_back({prev, v, Axis::Y});
        }
        prev = v;
      }
    }
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      int prev = -1;
      for (int k = 0; k < nz; ++k) {
        const int v = cell(i, j, k);
        if (v < 0) continue;
        if (prev >= 0) {
          const int a = vs[prev].idx[2];
          if (front.v_covered(i, a, k) && side.v_covered(j, a, k)) out.push_back({prev, v, Axis::Z});
        }
        prev = v;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Faces

namespace {

// The two in-plane axes of a plane with the given normal, in axis order.
std::pair<Axis, Axis> plane_axes(Axis normal) {
  switch (normal) {
    case Axis::X: return {Axis::Y, Axis::Z};
    case Axis::Y: return {Axis::X, Axis::Z};
    case Axis::Z: return {Axis::X, Axis::Y};
  }
  return {Axis::Y, Axis::Z};
}

// Connected components of a 2D/3D cell grid. `passable(cell, neighbor_dir)`
// style callbacks are expressed through explicit neighbor lists.
struct Components {
  std::vector<int> label;  // -2 outside, -1 unvisited, >= 0 component id
  int count = 0;
};

}  // namespace

std::vector<CandidateFace> gen_faces(const DrawingIndex& d, std::span<const CandidateVertex> vs,
                                     std::span<const CandidateEdge> es) {
  const Grid& g = d.grid();
  std::vector<CandidateFace> out;

  for (Axis normal : {Axis::X, Axis::Y, Axis::Z}) {
    const auto [pa, qa] = plane_axes(normal);
    const int np = g.size(pa), nq = g.size(qa);
    if (np < 2 || nq < 2) continue;
    const int cp = np - 1, cq = nq - 1;

    // bucket the edges lying in each plane of this family
    std::vector<std::vector<int>> in_plane(g.size(normal));
    for (std::size_t e = 0; e < es.size(); ++e) {
      if (es[e].axis == normal) continue;
      in_plane[vs[es[e].v0].idx[index_of(normal)]].push_back(static_cast<int>(e));
    }

    for (int k = 0; k < g.size(normal); ++k) {
      if (in_plane[k].size() < 4) continue;
      // blocked[p-line][q-unit] for edges along q, blocked_q[q-line][p-unit] for edges along p
      std::vector<std::uint8_t> wall_p(static_cast<std::size_t>(np) * cq, 0);
      std::vector<std::uint8_t> wall_q(static_cast<std::size_t>(nq) * cp, 0);
      for (int e : in_plane[k]) {
        const auto& a = vs[es[e].v0].idx;
        const auto& b = vs[es[e].v1].idx;
        if (es[e].axis == pa) {
          for (int p = a[index_of(pa)]; p < b[index_of(pa)]; ++p) wall_q[static_cast<std::size_t>(a[index_of(qa)]) * cp + p] = 1;
        } else {
          for (int q = a[index_of(qa)]; q < b[index_of(qa)]; ++q) wall_p[static_cast<std::size_t>(a[index_of(pa)]) * cq + q] = 1;
        }
      }
      auto cid = [cq](int p, int q) { return p * cq + q; };
      std::vector<int> label(static_cast<std::size_t>(cp) * cq, -1);

      // flood from outside
      std::deque<int> queue;
      auto seed_outside = [&](int p, int q) {
        if (label[cid(p, q)] == -1) {
          label[cid(p, q)] = -2;
          queue.push_back(cid(p, q));
        }
      };
      for (int q = 0; q < cq; ++q) {
        if (!wall_p[static_cast<std::size_t>(0) * cq + q]) seed_outside(0, q);
        if (!wall_p[static_cast<std::size_t>(np - 1) * cq + q]) seed_outside(cp - 1, q);
      }
      for (int p = 0; p < cp; ++p) {
        if (!wall_q[static_cast<std::size_t>(0) * cp + p]) seed_outside(p, 0);
        if (!wall_q[static_cast<std::size_t>(nq - 1) * cp + p]) seed_outside(p, cq - 1);
      }
      auto flood = [&](int mark) {
        while (!queue.empty()) {
          const int c = queue.front();
          queue.pop_front();
          const int p = c / cq, q = c % cq;
          auto visit = [&](int p2, int q2) {
            if (label[cid(p2, q2)] == -1) {
              label[cid(p2, q2)] = mark;
              queue.push_back(cid(p2, q2));
            }
          };
          if (p > 0 && !wall_p[static_cast<std::size_t>(p) * cq + q]) visit(p - 1, q);
          if (p + 1 < cp && !wall_p[static_cast<std::size_t>(p + 1) * cq + q]) visit(p + 1, q);
          if (q > 0 && !wall_q[static_cast<std::size_t>(q) * cp + p]) visit(p, q - 1);
          if (q + 1 < cq && !wall_q[static_cast<std::size_t>(q + 1) * cp + p]) visit(p, q + 1);
        }
      };
      flood(-2);

      const int first_face = static_cast<int>(out.size());
      for (int c = 0; c < cp * cq; ++c) {
        if (label[c] != -1) continue;
        const int id = static_cast<int>(out.size());
        label[c] = id;
        queue.push_back(c);
        flood(id);
        CandidateFace f;
        f.normal = normal;
        f.offset = k;
        f.offset_value = g.at(normal, k);
        out.push_back(std::move(f));
      }
      for (int c = 0; c < cp * cq; ++c) {
        if (label[c] >= 0) out[label[c]].cells.push_back({c / cq, c % cq});
      }

      // boundary edges: any edge with a face cell on either side
      for (int e : in_plane[k]) {
        const auto& a = vs[es[e].v0].idx;
        const auto& b = vs[es[e].v1].idx;
        std::set<int> touching;
        if (es[e].axis == pa) {
          const int q = a[index_of(qa)];
          for (int p = a[index_of(pa)]; p < b[index_of(pa)]; ++p) {
            if (q > 0 && label[cid(p, q - 1)] >= 0) touching.insert(label[cid(p, q - 1)]);
            if (q < cq && label[cid(p, q)] >= 0) touching.insert(label[cid(p, q)]);
          }
        } else {
          const int p = a[index_of(pa)];
          for (int q = a[index_of(qa)]; q < b[index_of(qa)]; ++q) {
            if (p > 0 && label[cid(p - 1, q)] >= 0) touching.insert(label[cid(p - 1, q)]);
            if (p < cp && label[cid(p, q)] >= 0) touching.insert(label[cid(p, q)]);
          }
        }
        for (int f : touching) {
          if (f >= first_face) out[f].boundary_edges.push_back(e);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Blocks

bool CandidateBlock::is_box() const {
  const double v = aabb.volume();
  return std::abs(v - volume) <= 1e-9 * std::max(1.0, v);
}

std::vector<CandidateBlock> gen_blocks(const DrawingIndex& d, std::span<const CandidateFace> fs) {
  const Grid& g = d.grid();
  const int nx = g.size(Axis::X), ny = g.size(Axis::Y), nz = g.size(Axis::Z);
  if (nx < 2 || ny < 2 || nz < 2) return {};
  const std::array<int, 3> n = {nx - 1, ny - 1, nz - 1};

  // cover[normal][plane][p * cq + q] -> face id or -1
  std::array<std::vector<std::vector<int>>, 3> cover;
  for (Axis normal : {Axis::X, Axis::Y, Axis::Z}) {
    const auto [pa, qa] = plane_axes(normal);
    const std::size_t cells = static_cast<std::size_t>(n[index_of(pa)]) * n[index_of(qa)];
    cover[index_of(normal)].assign(g.size(normal), std::vector<int>(cells, -1));
  }
  for (std::size_t f = 0; f < fs.size(); ++f) {
    const auto [pa, qa] = plane_axes(fs[f].normal);
    const int cq = n[index_of(qa)];
    for (const auto& c : fs[f].cells) {
      cover[index_of(fs[f].normal)][fs[f].offset][static_cast<std::size_t>(c[0]) * cq + c[1]] = static_cast<int>(f);
    }
  }
  // face between cell (i,j,k) and its neighbor across the plane `line` of `axis`
  auto face_at = [&](int axis, int line, const std::array<int, 3>& c) {
    const auto [pa, qa] = plane_axes(static_cast<Axis>(axis));
    const int cq = n[index_of(qa)];
    return cover[axis][line][static_cast<std::size_t>(c[index_of(pa)]) * cq + c[index_of(qa)]];
  };

  auto cid = [&](const std::array<int, 3>& c) {
    return (static_cast<std::size_t>(c[0]) * n[1] + c[1]) * n[2] + c[2];
  };
  std::vector<int> label(static_cast<std::size_t>(n[0]) * n[1] * n[2], -1);
  std::deque<std::array<int, 3>> queue;

  auto flood = [&](int mark) {
    while (!queue.empty()) {
      const auto c = queue.front();
      queue.pop_front();
      for (int a = 0; a < 3; ++a) {
        for (int dir : {-1, 1}) {
          auto nb = c;
          nb[a] += dir;
          if (nb[a] < 0 || nb[a] >= n[a]) continue;
          const int line = dir > 0 ? c[a] + 1 : c[a];
          if (face_at(a, line, c) >= 0) continue;
          if (label[cid(nb)] == -1) {
            label[cid(nb)] = mark;
            queue.push_back(nb);
          }
        }
      }
    }
  };

  // everything reachable from outside the grid through uncovered boundary rectangles
  for (int i = 0; i < n[0]; ++i) {
    for (int j = 0; j < n[1]; ++j) {
      for (int k = 0; k < n[2]; ++k) {
        const std::array<int, 3> c = {i, j, k};
        bool open = false;
        for (int a = 0; a < 3 && !open; ++a) {
          if (c[a] == 0 && face_at(a, 0, c) < 0) open = true;
          if (c[a] == n[a] - 1 && face_at(a, n[a], c) < 0) open = true;
        }
        if (open && label[cid(c)] == -1) {
          label[cid(c)] = -2;
          queue.push_back(c);
        }
      }
    }
  }
  flood(-2);

  std::vector<CandidateBlock> blocks;
  for (int i = 0; i < n[0]; ++i) {
    for (int j = 0; j < n[1]; ++j) {
      for (int k = 0; k < n[2]; ++k) {
        const std::array<int, 3> c = {i, j, k};
        if (label[cid(c)] != -1) continue;
        const int id = static_cast<int>(blocks.size());
        label[cid(c)] = id;
        queue.push_back(c);
        flood(id);
        blocks.emplace_back();
      }
    }
  }
  for (int i = 0; i < n[0]; ++i) {
    for (int j = 0; j < n[1]; ++j) {
      for (int k = 0; k < n[2]; ++k) {
        const std::array<int, 3> c = {i, j, k};
        const int id = label[cid(c)];
        if (id < 0) continue;
        CandidateBlock& b = blocks[id];
        const Box box{{g.at(Axis::X, i), g.at(Axis::Y, j), g.at(Axis::Z, k)},
                      {g.at(Axis::X, i + 1), g.at(Axis::Y, j + 1), g.at(Axis::Z, k + 1)}};
        b.aabb = b.cells.empty() ? box : bounding_union(b.aabb, box);
        b.cells.push_back(c);
        b.cell_boxes.push_back(box);
        b.volume += box.volume();
        for (int a = 0; a < 3; ++a) {
          for (int line : {c[a], c[a] + 1}) {
            const int f = face_at(a, line, c);
            if (f >= 0) b.boundary_faces.push_back(f);
          }
        }
      }
    }
  }
  for (auto& b : blocks) {
    std::sort(b.boundary_faces.begin(), b.boundary_faces.end());
    b.boundary_faces.erase(std::unique(b.boundary_faces.begin(), b.boundary_faces.end()),
                           b.boundary_faces.end());
  }
  return blocks;
}

// ---------------------------------------------------------------------------
// Solutions

std::string_view status_name(SolutionStatus s) {
  switch (s) {
    case SolutionStatus::Verified: return "Verified";
    case SolutionStatus::UnionFallback: return "UnionFallback";
    case SolutionStatus::NoMatch: return "NoMatch";
    case SolutionStatus::Timeout: return "Timeout";
  }
  return "?";
}

ReconSolution union_all(std::span<const CandidateBlock> blocks) {
  ReconSolution s;
  s.status = SolutionStatus::UnionFallback;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    s.chosen.push_back(static_cast<int>(i));
    s.blocks.push_back(blocks[i]);
  }
  return s;
}

std::vector<Box> group_blocks(const ReconSolution& sol, std::span<const Box> gt) {
  std::vector<std::optional<Box>> groups(gt.size());
  std::vector<Box> singles;
  for (const CandidateBlock& b : sol.blocks) {
    int best = -1;
    double best_overlap = 0.0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      double overlap = 0.0;
      for (const Box& c : b.cell_boxes) overlap += intersection_volume(c, gt[g]);
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = static_cast<int>(g);
      }
    }
    if (best < 0) {
      singles.push_back(b.aabb);
    } else {
      groups[best] = groups[best] ? bounding_union(*groups[best], b.aabb) : b.aabb;
    }
  }
  std::vector<Box> out;
  for (const auto& g : groups) {
    if (g) out.push_back(*g);
  }
  out.insert(out.end(), singles.begin(), singles.end());
  return out;
}

std::optional<std::size_t> reprojection_diff(const ReconSolution& sol, const DrawingSet& input) {
  std::vector<Box> boxes;
  for (const CandidateBlock& b : sol.blocks) {
    if (!b.is_box()) return std::nullopt;
    boxes.push_back(b.aabb);
  }
  return drawing_diff(project(boxes, input.scale_mm_per_unit), input);
}

ReconResult reconstruct(const DrawingSet& d, ReconVariant variant, const SearchOptions& opts) {
  ReconResult r;
  const DrawingIndex index(d);
  const auto vs = gen_vertices(index);
  const auto es = gen_edges(index, vs);
  const auto fs = gen_faces(index, vs, es);
  r.candidates = gen_blocks(index, fs);
  r.vertices = vs.size();
  r.edges = es.size();
  r.faces = fs.size();
  r.solution = variant == ReconVariant::Verify ? verify_search(index, r.candidates, opts)
                                               : union_all(r.candidates);
  return r;
}

std::string solution_to_json(const ReconSolution& s) {
  nlohmann::ordered_json j;
  j["status"] = status_name(s.status);
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& b : s.blocks) blocks.push_back(b.aabb.dofs());
  j["blocks"] = blocks;
  return j.dump();
}

std::pair<SolutionStatus, std::vector<Box>> solution_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const std::string st = j.at("status").get<std::string>();
    SolutionStatus status = SolutionStatus::NoMatch;
    bool known = false;
    for (auto s : {SolutionStatus::Verified, SolutionStatus::UnionFallback, SolutionStatus::NoMatch,
                   SolutionStatus::Timeout}) {
      if (status_name(s) == st) {
        status = s;
        known = true;
      }
    }
    if (!known) throw Error("unknown solution status '" + st + "'");
    std::vector<Box> boxes;
    for (const auto& b : j.at("blocks")) boxes.push_back(Box::from_dofs(b.get<std::array<double, 6>>()));
    return {status, boxes};
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("solution JSON: ") + e.what());
  }
}

}  // namespace plankforge

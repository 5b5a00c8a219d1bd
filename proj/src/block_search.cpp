#include <algorithm>
#include <climits>
#include <numeric>

#include "plankforge/rng.hpp"
#include "plankforge/wireframe.hpp"

namespace plankforge {

namespace {

constexpr std::size_t kMaxSampledSolutions = 256;

struct Seg {
  int bit;
  int depth;  // smaller is nearer
};

struct Column {
  int view;
  int col;
  int key;
};

struct BlockImage {
  std::vector<Seg> segs;  // one entry per bit, nearest depth
  std::vector<Column> columns;
};

// Projects blocks onto the rasters of a DrawingIndex with integer depth keys.
// Grid indices stand in for coordinates; the order is all that matters.
class BlockProjector {
 public:
  BlockProjector(const DrawingIndex& d, std::span<const CandidateBlock> blocks) : d_(d) {
    const Grid& g = d.grid();
    n_ = {g.size(Axis::X) - 1, g.size(Axis::Y) - 1, g.size(Axis::Z) - 1};
    int off = 0;
    for (View v : kViews) {
      offset_[static_cast<int>(v)] = off;
      off += std::max(0, d.raster(v).unit_count());
    }
    total_bits_ = off;
    if (n_[0] < 1 || n_[1] < 1 || n_[2] < 1) return;
    label_.assign(static_cast<std::size_t>(n_[0]) * n_[1] * n_[2], -1);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (const auto& c : blocks[b].cells) label_[cid(c[0], c[1], c[2])] = static_cast<int>(b);
    }
    images_.reserve(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) images_.push_back(image(blocks[b], static_cast<int>(b)));
  }

  int total_bits() const { return total_bits_; }
  int offset(View v) const { return offset_[static_cast<int>(v)]; }
  const BlockImage& image(int b) const { return images_[b]; }

  // Unit states (0/1/2 per global bit) for a set of blocks drawn as separate solids.
  std::vector<std::uint8_t> render(std::span<const int> chosen) const {
    std::vector<int> depth(total_bits_, INT_MAX);
    std::array<std::vector<int>, 3> near;
    for (View v : kViews) {
      const ViewRaster& r = d_.raster(v);
      near[static_cast<int>(v)].assign(std::max(0, (r.nu - 1) * (r.nv - 1)), INT_MAX);
    }
    for (int b : chosen) {
      for (const Seg& s : images_[b].segs) depth[s.bit] = std::min(depth[s.bit], s.depth);
      for (const Column& c : images_[b].columns) near[c.view][c.col] = std::min(near[c.view][c.col], c.key);
    }
    std::vector<std::uint8_t> state(total_bits_, 0);
    for (int bit = 0; bit < total_bits_; ++bit) {
      if (depth[bit] == INT_MAX) continue;
      state[bit] = occluded(bit, depth[bit], near) ? 1 : 2;
    }
    return state;
  }

  // Same as render() restricted to `bits`, compared against `want`.
  bool matches(std::span<const int> chosen, std::span<const int> bits,
               std::span<const std::uint8_t> want, std::vector<int>& depth,
               std::array<std::vector<int>, 3>& near) const {
    for (int b : chosen) {
      for (const Seg& s : images_[b].segs) depth[s.bit] = std::min(depth[s.bit], s.depth);
      for (const Column& c : images_[b].columns) near[c.view][c.col] = std::min(near[c.view][c.col], c.key);
    }
    bool ok = true;
    for (std::size_t i = 0; i < bits.size() && ok; ++i) {
      const int bit = bits[i];
      if (depth[bit] == INT_MAX) {
        ok = false;
      } else {
        ok = (occluded(bit, depth[bit], near) ? 1 : 2) == want[bit];
      }
    }
    for (int b : chosen) {
      for (const Seg& s : images_[b].segs) depth[s.bit] = INT_MAX;
      for (const Column& c : images_[b].columns) near[c.view][c.col] = INT_MAX;
    }
    return ok;
  }

  void scratch(std::vector<int>& depth, std::array<std::vector<int>, 3>& near) const {
    depth.assign(total_bits_, INT_MAX);
    for (View v : kViews) {
      const ViewRaster& r = d_.raster(v);
      near[static_cast<int>(v)].assign(std::max(0, (r.nu - 1) * (r.nv - 1)), INT_MAX);
    }
  }

 private:
  std::size_t cid(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_[1] + j) * n_[2] + k;
  }
  bool member(int b, int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= n_[0] || j >= n_[1] || k >= n_[2]) return false;
    return label_[cid(i, j, k)] == b;
  }
  // A grid edge is a drawn edge of the solid unless the four cells around it
  // are all in, all out, or split into two flat halves.
  static bool drawn(bool a, bool b, bool c, bool dd) {
    const int n = a + b + c + dd;
    if (n == 1 || n == 3) return true;
    return n == 2 && a == dd;  // a,d and b,c are the diagonals
  }

  BlockImage image(const CandidateBlock& blk, int b) const {
    const ViewRaster& front = d_.raster(View::Front);
    const ViewRaster& top = d_.raster(View::Top);
    const ViewRaster& side = d_.raster(View::Side);
    const int fo = offset(View::Front), to = offset(View::Top), so = offset(View::Side);

    std::vector<std::pair<int, int>> raw;
    std::vector<Column> cols;
    auto add = [&](int bit, int depth) { raw.push_back({bit, depth}); };

    for (const auto& c : blk.cells) {
      const int i = c[0], j = c[1], k = c[2];
      cols.push_back({static_cast<int>(View::Front), i * (n_[2]) + k, j});
      cols.push_back({static_cast<int>(View::Top), i * (n_[1]) + j, -(k + 1)});
      cols.push_back({static_cast<int>(View::Side), j * (n_[2]) + k, -(i + 1)});

      // the 12 grid edges of this cell; duplicates are removed below
      for (int dj = 0; dj < 2; ++dj) {
        for (int dk = 0; dk < 2; ++dk) {
          const int y = j + dj, z = k + dk;
          if (drawn(member(b, i, y - 1, z - 1), member(b, i, y, z - 1), member(b, i, y - 1, z), member(b, i, y, z))) {
            add(fo + front.h_unit(z, i), y);
            add(to + top.h_unit(y, i), -z);
          }
        }
      }
      for (int di = 0; di < 2; ++di) {
        for (int dk = 0; dk < 2; ++dk) {
          const int x = i + di, z = k + dk;
          if (drawn(member(b, x - 1, j, z - 1), member(b, x, j, z - 1), member(b, x - 1, j, z), member(b, x, j, z))) {
            add(to + top.v_unit(x, j), -z);
            add(so + side.h_unit(z, j), -x);
          }
        }
      }
      for (int di = 0; di < 2; ++di) {
        for (int dj = 0; dj < 2; ++dj) {
          const int x = i + di, y = j + dj;
          if (drawn(member(b, x - 1, y - 1, k), member(b, x, y - 1, k), member(b, x - 1, y, k), member(b, x, y, k))) {
            add(fo + front.v_unit(x, k), y);
            add(so + side.v_unit(y, k), -x);
          }
        }
      }
    }
    BlockImage img;
    std::sort(raw.begin(), raw.end());
    for (const auto& [bit, depth] : raw) {
      if (img.segs.empty() || img.segs.back().bit != bit) img.segs.push_back({bit, depth});
    }
    std::sort(cols.begin(), cols.end(), [](const Column& a, const Column& c) {
      return std::tie(a.view, a.col, a.key) < std::tie(c.view, c.col, c.key);
    });
    for (const Column& c : cols) {
      if (img.columns.empty() || img.columns.back().view != c.view || img.columns.back().col != c.col) {
        img.columns.push_back(c);
      }
    }
    return img;
  }

  // Hidden when solids nearer than `depth` cover both sides of the unit.
  bool occluded(int bit, int depth, const std::array<std::vector<int>, 3>& near) const {
    int v = 2;
    while (v > 0 && bit < offset_[v]) --v;
    const ViewRaster& r = d_.raster(static_cast<View>(v));
    const int local = bit - offset_[v];
    const auto& nr = near[v];
    auto col = [&](int uu, int vu) { return uu * (r.nv - 1) + vu; };
    if (local < r.horizontal_units()) {
      const int line = local / (r.nu - 1), u = local % (r.nu - 1);
      if (line == 0 || line == r.nv - 1) return false;
      return nr[col(u, line - 1)] < depth && nr[col(u, line)] < depth;
    }
    const int rest = local - r.horizontal_units();
    const int line = rest / (r.nv - 1), w = rest % (r.nv - 1);
    if (line == 0 || line == r.nu - 1) return false;
    return nr[col(line - 1, w)] < depth && nr[col(line, w)] < depth;
  }

  const DrawingIndex& d_;
  std::array<int, 3> n_{};
  std::array<int, 3> offset_{};
  int total_bits_ = 0;
  std::vector<int> label_;
  std::vector<BlockImage> images_;
};

class Search {
 public:
  Search(const BlockProjector& proj, std::vector<int> order, std::vector<int> target_bits,
         std::vector<std::uint8_t> want, const SearchOptions& opts)
      : proj_(proj), order_(std::move(order)), bits_(std::move(target_bits)), want_(std::move(want)),
        opts_(opts), start_(std::chrono::steady_clock::now()) {
    proj_.scratch(depth_, near_);
    avail_.assign(proj.total_bits(), 0);
    covered_.assign(proj.total_bits(), 0);
    for (int b : order_) {
      for (const Seg& s : proj_.image(b).segs) ++avail_[s.bit];
    }
  }

  // Returns false on timeout.
  bool run(int k) {
    k_ = k;
    uncovered_ = static_cast<int>(bits_.size());
    return dfs(0);
  }

  std::vector<std::vector<int>> found;
  std::size_t nodes = 0;
  bool collect_all = false;

 private:
  bool dfs(std::size_t idx) {
    if (++nodes % 1024 == 0 && std::chrono::steady_clock::now() - start_ > opts_.timeout) return false;
    const int chosen = static_cast<int>(chosen_.size());
    if (chosen == k_) {
      if (uncovered_ == 0 && proj_.matches(chosen_, bits_, want_, depth_, near_)) found.push_back(chosen_);
      return true;
    }
    if (idx == order_.size() || order_.size() - idx < static_cast<std::size_t>(k_ - chosen)) return true;
    const int b = order_[idx];
    const auto& segs = proj_.image(b).segs;

    // include
    for (const Seg& s : segs) {
      if (covered_[s.bit]++ == 0) --uncovered_;
    }
    chosen_.push_back(b);
    const bool ok = dfs(idx + 1);
    chosen_.pop_back();
    for (const Seg& s : segs) {
      if (--covered_[s.bit] == 0) ++uncovered_;
    }
    if (!ok) return false;
    if (!found.empty() && (!collect_all || found.size() >= kMaxSampledSolutions)) return true;

    // exclude: every still-uncovered bit needs a remaining coverer
    bool feasible = true;
    for (const Seg& s : segs) {
      if (--avail_[s.bit] == 0 && covered_[s.bit] == 0) feasible = false;
    }
    bool ok2 = true;
    if (feasible) ok2 = dfs(idx + 1);
    for (const Seg& s : segs) ++avail_[s.bit];
    return ok2;
  }

  const BlockProjector& proj_;
  std::vector<int> order_;
  std::vector<int> bits_;
  std::vector<std::uint8_t> want_;
  const SearchOptions& opts_;
  std::chrono::steady_clock::time_point start_;
  std::vector<int> depth_;
  std::array<std::vector<int>, 3> near_;
  std::vector<int> avail_, covered_;
  std::vector<int> chosen_;
  int k_ = 0;
  int uncovered_ = 0;
};

}  // namespace

ViewRaster block_raster(const DrawingIndex& d, std::span<const CandidateBlock> blocks, View v) {
  const BlockProjector proj(d, blocks);
  std::vector<int> all(blocks.size());
  std::iota(all.begin(), all.end(), 0);
  const auto state = proj.render(all);
  ViewRaster r = d.raster(v);
  const int off = proj.offset(v);
  for (int u = 0; u < static_cast<int>(r.state.size()); ++u) r.state[u] = state[off + u];
  return r;
}

ReconSolution verify_search(const DrawingIndex& d, std::span<const CandidateBlock> blocks,
                            const SearchOptions& opts) {
  ReconSolution sol;
  const BlockProjector proj(d, blocks);

  std::vector<std::uint8_t> want(proj.total_bits(), 0);
  std::vector<int> target;
  for (View v : kViews) {
    const ViewRaster& r = d.raster(v);
    for (int u = 0; u < static_cast<int>(r.state.size()); ++u) {
      want[proj.offset(v) + u] = r.state[u];
      if (r.state[u]) target.push_back(proj.offset(v) + u);
    }
  }
  if (target.empty()) {
    if (blocks.empty()) sol.status = SolutionStatus::Verified;
    return sol;
  }

  // blocks drawing anything outside the target can never be part of a match
  std::vector<int> order;
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    const auto& segs = proj.image(b).segs;
    if (std::all_of(segs.begin(), segs.end(), [&](const Seg& s) { return want[s.bit] != 0; })) order.push_back(b);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return blocks[a].volume > blocks[b].volume; });
  std::vector<int> coverers(proj.total_bits(), 0);
  for (int b : order) {
    for (const Seg& s : proj.image(b).segs) ++coverers[s.bit];
  }
  for (int bit : target) {
    if (coverers[bit] == 0) return sol;  // NoMatch
  }

  Search search(proj, order, target, want, opts);
  search.collect_all = opts.sample_seed.has_value();
  for (int k = 1; k <= static_cast<int>(order.size()); ++k) {
    const bool finished = search.run(k);
    sol.nodes_visited = search.nodes;
    if (!finished) {
      sol.status = SolutionStatus::Timeout;
      return sol;
    }
    if (!search.found.empty()) {
      std::size_t pick = 0;
      if (opts.sample_seed) {
        const std::size_t n = std::min(search.found.size(), kMaxSampledSolutions);
        Rng rng(*opts.sample_seed);
        pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
      }
      sol.status = SolutionStatus::Verified;
      sol.chosen = search.found[pick];
      std::sort(sol.chosen.begin(), sol.chosen.end());
      for (int b : sol.chosen) sol.blocks.push_back(blocks[b]);
      return sol;
    }
  }
  return sol;
}

}  // namespace plankforge

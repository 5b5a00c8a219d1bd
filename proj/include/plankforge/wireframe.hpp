#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plankforge/geometry.hpp"
#include "plankforge/projector.hpp"

namespace plankforge {

/// Coordinate matching tolerance for reconstruction: half a quantization bin.
inline constexpr double kReconSnapTol = 1.0 / 511.0;

/// Distinct coordinate values per axis after tolerance clustering.
struct Grid {
  std::array<std::vector<double>, 3> values;

  int size(Axis a) const { return static_cast<int>(values[index_of(a)].size()); }
  double at(Axis a, int i) const { return values[index_of(a)][i]; }
  /// Index of the cluster holding `v`, or -1 if none is within `tol`.
  int snap(Axis a, double v, double tol) const;
};

/// Unit-segment raster of one view over the grid. A unit is the piece of a
/// grid line between two consecutive grid coordinates.
struct ViewRaster {
  int nu = 0;  ///< grid lines along u
  int nv = 0;  ///< grid lines along v
  /// 0 = absent, 1 = hidden, 2 = visible. Horizontal units first.
  std::vector<std::uint8_t> state;
  std::vector<std::uint8_t> node;  ///< nu * nv, 1 where a drawing node sits

  int horizontal_units() const { return nv * (nu - 1); }
  int unit_count() const { return horizontal_units() + nu * (nv - 1); }
  int h_unit(int v_line, int u_unit) const { return v_line * (nu - 1) + u_unit; }
  int v_unit(int u_line, int v_unit_) const { return horizontal_units() + u_line * (nv - 1) + v_unit_; }
  bool is_node(int ui, int vi) const { return node[static_cast<std::size_t>(ui) * nv + vi] != 0; }
  /// True if every unit of the horizontal line `v_line` in [u0, u1) is drawn.
  bool h_covered(int v_line, int u0, int u1) const;
  bool v_covered(int u_line, int v0, int v1) const;
};

/// A drawing snapped onto a shared coordinate grid.
class DrawingIndex {
 public:
  explicit DrawingIndex(const DrawingSet& d, double snap_tol = kReconSnapTol);

  const Grid& grid() const { return grid_; }
  const ViewRaster& raster(View v) const { return rasters_[static_cast<int>(v)]; }
  double snap_tol() const { return snap_tol_; }
  std::size_t skipped_edges() const { return skipped_; }

 private:
  Grid grid_;
  std::array<ViewRaster, 3> rasters_;
  double snap_tol_;
  std::size_t skipped_ = 0;
};

struct CandidateVertex {
  std::array<int, 3> idx{};  ///< grid indices
  std::array<double, 3> position{};
};

struct CandidateEdge {
  int v0 = -1, v1 = -1;  ///< vertex ids, v0 has the smaller coordinate
  Axis axis = Axis::X;
};

struct CandidateFace {
  Axis normal = Axis::X;
  int offset = 0;  ///< grid index along the normal
  double offset_value = 0.0;
  /// Cells of the in-plane grid covered by the face, as (p, q) indices over
  /// the two remaining axes in increasing axis order.
  std::vector<std::array<int, 2>> cells;
  std::vector<int> boundary_edges;
};

struct CandidateBlock {
  std::vector<std::array<int, 3>> cells;  ///< grid cell indices
  std::vector<Box> cell_boxes;
  std::vector<int> boundary_faces;
  Box aabb;
  double volume = 0.0;

  bool is_box() const;
};

std::vector<CandidateVertex> gen_vertices(const DrawingIndex& d);
std::vector<CandidateEdge> gen_edges(const DrawingIndex& d, std::span<const CandidateVertex> vs);
std::vector<CandidateFace> gen_faces(const DrawingIndex& d, std::span<const CandidateVertex> vs,
                                     std::span<const CandidateEdge> es);
std::vector<CandidateBlock> gen_blocks(const DrawingIndex& d, std::span<const CandidateFace> fs);

enum class SolutionStatus { Verified, UnionFallback, NoMatch, Timeout };
std::string_view status_name(SolutionStatus s);

struct ReconSolution {
  SolutionStatus status = SolutionStatus::NoMatch;
  std::vector<int> chosen;  ///< indices into the candidate block list
  std::vector<CandidateBlock> blocks;  ///< copies of the chosen blocks
  std::size_t nodes_visited = 0;
};

struct SearchOptions {
  std::chrono::milliseconds timeout{300'000};
  /// When set, all exact matches at the minimal cardinality are collected and
  /// one is drawn with this seed instead of returning the first.
  std::optional<std::uint64_t> sample_seed;
};

/// Re-projection verification: enumerate block subsets by increasing size and
/// return the first whose drawing equals the input exactly.
ReconSolution verify_search(const DrawingIndex& d, std::span<const CandidateBlock> blocks,
                            const SearchOptions& opts = {});

/// Drawing of a set of blocks as separate solids, rasterized on the grid of `d`.
ViewRaster block_raster(const DrawingIndex& d, std::span<const CandidateBlock> blocks, View v);

ReconSolution union_all(std::span<const CandidateBlock> blocks);

/// Merge blocks overlapping the same ground-truth plank into one prediction
/// (the union AABB). Blocks overlapping nothing stay single predictions.
std::vector<Box> group_blocks(const ReconSolution& sol, std::span<const Box> gt);

/// Independent re-check of a verified solution with project(). Returns the
/// number of differing edges, or nullopt when a chosen block is not a box.
std::optional<std::size_t> reprojection_diff(const ReconSolution& sol, const DrawingSet& input);

enum class ReconVariant { Verify, Union };

struct ReconResult {
  std::size_t vertices = 0, edges = 0, faces = 0;
  std::vector<CandidateBlock> candidates;
  ReconSolution solution;
};

/// Full pipeline: vertices, edges, faces, blocks, then search or union.
ReconResult reconstruct(const DrawingSet& d, ReconVariant variant, const SearchOptions& opts = {});

std::string solution_to_json(const ReconSolution& s);
/// Block AABBs from a solution JSON document, plus its status.
std::pair<SolutionStatus, std::vector<Box>> solution_from_json(std::string_view text);

}  // namespace plankforge

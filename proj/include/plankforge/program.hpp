#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "plankforge/geometry.hpp"

namespace plankforge {

struct Literal {
  double value = 0.0;
  friend bool operator==(const Literal&, const Literal&) = default;
};

/// Reference to a DOF of an earlier cuboid. Index 0 is the bounding box.
struct Attach {
  int plank = 0;
  Dof dof = Dof::XMin;
  friend bool operator==(const Attach&, const Attach&) = default;
};

using CoordRef = std::variant<Literal, Attach>;

struct Cuboid {
  std::array<CoordRef, kDofCount> coords{};

  static Cuboid literal(const Box& b);
  bool is_literal(Dof d) const { return std::holds_alternative<Literal>(coords[index_of(d)]); }
  friend bool operator==(const Cuboid&, const Cuboid&) = default;
};

/// A cabinet shape program. `cuboids[0]` is the bounding box; `cuboids[k]`
/// for k >= 1 is plank k. References always point backwards.
struct Program {
  double scale_mm_per_unit = 1000.0;
  std::vector<Cuboid> cuboids;

  bool has_bbox() const { return !cuboids.empty(); }
  std::size_t plank_count() const { return cuboids.empty() ? 0 : cuboids.size() - 1; }
  friend bool operator==(const Program&, const Program&) = default;
};

/// Same references everywhere and literals within `tol`.
bool structurally_equal(const Program& a, const Program& b, double tol);

/// Model-space distance that corresponds to `mm` millimeters.
inline double mm_to_units(double mm, double scale_mm_per_unit) { return mm / scale_mm_per_unit; }

Program parse_program(std::string_view text);
std::string print_program(const Program& p);

/// Execute the program. The bounding box is returned first only when
/// `include_bbox` is set. Throws ZeroVolumeError.
std::vector<Box> resolve(const Program& p, bool include_bbox = false);

struct Diagnostic {
  int plank = -1;
  int dof = -1;
  std::string code;
  std::string message;
};

std::vector<Diagnostic> validate(const Program& p);

/// Set a literal coordinate and re-execute. Throws EditOnAttachmentError if
/// the coordinate is an attachment, ZeroVolumeError as in resolve().
std::vector<Box> edit_propagate(const Program& p, int plank, Dof dof, double new_value);

/// Attachment rule: a DOF attached to the bounding box refers to the same
/// DOF (the plank is flush with the container); a DOF attached to another
/// plank refers to the opposite DOF on the same axis.
bool attachment_legal(Dof from, int target_plank, Dof target_dof);

struct InferOptions {
  double threshold = 0.001;                 ///< normalized units
  std::optional<Box> bbox;                  ///< defaults to the planks' bounding box
  double scale_mm_per_unit = 1000.0;
};

/// Default threshold: 1mm expressed in normalized units.
inline double default_attach_threshold(double scale_mm_per_unit) {
  return mm_to_units(1.0, scale_mm_per_unit);
}

/// Rebuild a program from raw geometry by detecting flush endface->sideface
/// contacts. Output planks are topologically re-ordered (stable otherwise).
/// Throws CyclicAttachmentError.
Program infer_attachments(std::span<const Box> planks, const InferOptions& opts);

/// Faces-as-vertices attachment DAG. Face id = 6 * cuboid + dof.
struct AttachmentGraph {
  std::size_t face_count = 0;
  std::vector<std::pair<int, int>> edges;  ///< (from face, to face), sorted

  std::size_t edge_count() const { return edges.size(); }
  bool adjacent(int from, int to) const;
};

AttachmentGraph to_graph(const Program& p);
/// Per-face values: literal where the face is free, resolved value otherwise.
std::vector<double> face_values(const Program& p);
/// Inverse of to_graph(); `values[f]` is used for faces without an out-edge.
/// Throws GraphError on out-degree > 1 or non-backward edges.
Program from_graph(const AttachmentGraph& g, std::span<const double> values,
                   double scale_mm_per_unit = 1000.0);

/// Reorder cuboids, remapping references. `order[k]` is the old index placed
/// at new position k; order[0] must be 0 and the result must stay backward.
Program permute(const Program& p, std::span<const int> order);

// JSON / file helpers (program_io.cpp)
std::string program_to_json(const Program& p);
Program program_from_json(std::string_view text);
Program load_program(const std::string& path);
void save_program(const Program& p, const std::string& path);

}  // namespace plankforge

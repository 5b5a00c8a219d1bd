#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "plankforge/program.hpp"
#include "plankforge/projector.hpp"

namespace plankforge {

inline constexpr int kQuantBits = 9;
inline constexpr int kNumBins = 1 << kQuantBits;  // 512
inline constexpr int kSosToken = kNumBins;        // vocabulary index of [SOS]
inline constexpr int kEosToken = kNumBins + 1;    // vocabulary index of [EOS]
inline constexpr int kVocabSize = kNumBins + 2;
inline constexpr int kSchemaVersion = 1;

/// bin = round((x + 1) / 2 * 511), clamped to [0, 511]. `clamped` is set
/// when x was outside [-1, 1].
int quantize(double x, bool* clamped = nullptr);
/// Bin center: bin * 2 / 511 - 1.
double dequantize(int bin);
/// Round-trip a value onto the quantization grid.
inline double snap_to_grid(double x) { return dequantize(quantize(x)); }

enum class VisType : std::uint8_t { Visible = 0, Hidden = 1 };

struct InputToken {
  int value_bin = 0;
  int view = 0;       ///< 0 front, 1 top, 2 side
  int edge_idx = 0;   ///< ordinal of the edge within its view
  int coord_idx = 0;  ///< 0..3 for x1, y1, x2, y2
  VisType vis_type = VisType::Visible;
  friend bool operator==(const InputToken&, const InputToken&) = default;
};

enum class TokenKind : std::uint8_t { Sos = 0, Eos = 1, Value = 2, Pointer = 3 };

/// Output token. `arg` is the bin for Value and the absolute target position
/// for Pointer (SOS sits at position 0, so DOF tokens start at 1).
struct OutputToken {
  TokenKind kind = TokenKind::Sos;
  int arg = 0;
  int plank_idx = 0;
  int face_idx = 0;
  friend bool operator==(const OutputToken&, const OutputToken&) = default;
};

/// Output position of DOF `dof` of the cuboid at sequence index `cuboid`.
constexpr int dof_position(int cuboid, int dof) { return 1 + cuboid * kDofCount + dof; }

std::vector<InputToken> encode_input(const DrawingSet& d);

/// Plank order used by the output sequence: bounding box first, then a
/// topological order of the plank dependency graph where ready planks are
/// taken by ascending resolved (x_min, y_min, z_min, x_max, y_max, z_max).
std::vector<int> canonical_order(const Program& p);
Program canonicalize(const Program& p);

/// Serialize `p` in canonical order. Sequence length is 6 * cuboids + 2.
std::vector<OutputToken> encode_output(const Program& p);

struct DecodeResult {
  Program program;
  bool bbox_present = false;
  std::vector<std::string> diagnostics;
};

/// Inverse of encode_output(). Truncates at the first EOS, drops a trailing
/// incomplete plank and planks with zero volume (references to a dropped
/// plank are replaced by the value they resolved to). Throws
/// MalformedPointerError.
DecodeResult decode_output(const std::vector<OutputToken>& tokens);

/// Legal choices for the next output token given `prefix` (which starts with
/// SOS). `vocab` is indexed by vocabulary id (bins, SOS, EOS); `positions` by
/// earlier output position.
struct PointerMask {
  std::vector<bool> vocab;
  std::vector<bool> positions;
};
PointerMask legal_pointer_mask(const std::vector<OutputToken>& prefix);

struct SequenceSample {
  std::string id;
  double scale_mm_per_unit = 1000.0;
  std::vector<InputToken> input;
  std::vector<OutputToken> output;
  friend bool operator==(const SequenceSample&, const SequenceSample&) = default;
};

/// One JSONL line (no trailing newline).
std::string sample_to_jsonl(const SequenceSample& s);
SequenceSample sample_from_jsonl(std::string_view line);

}  // namespace plankforge

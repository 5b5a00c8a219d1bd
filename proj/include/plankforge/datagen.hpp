#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "plankforge/program.hpp"
#include "plankforge/projector.hpp"
#include "plankforge/rng.hpp"
#include "plankforge/seq_codec.hpp"

namespace plankforge {

struct GenConfig {
  std::uint64_t seed = 0;
  int min_planks = 4;
  int max_planks = 20;
  std::size_t max_edges = 300;
  std::array<double, 2> width_mm{400.0, 1800.0};   // x
  std::array<double, 2> depth_mm{300.0, 700.0};    // y
  std::array<double, 2> height_mm{400.0, 2200.0};  // z
  std::array<double, 2> thickness_mm{12.0, 25.0};
  double back_prob = 0.85;      ///< chance the shell has a back panel
  double divider_prob = 0.4;    ///< chance a split is vertical rather than a shelf
  int max_retries = 200;

  void check() const;
};

/// One random cabinet: a shell attached to the bounding box, then shelves and
/// dividers splitting interior cells. All literals sit on the quantization
/// grid. Returned in canonical order. Throws RetryExhaustedError.
Program gen_cabinet(Rng& rng, const GenConfig& c);

/// Programs 0..n-1, program i drawn from Rng::derive(seed, i).
std::vector<Program> generate_programs(std::size_t n, const GenConfig& c, int jobs = 1);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;

  void check() const;
};

struct DatasetSample {
  std::string id;
  std::string split;
  Program program;
  DrawingSet drawing;
  SequenceSample sequence;
};

/// Drop programs with identical token streams (first one wins), number the
/// rest, project and encode them, and assign splits in id order.
std::vector<DatasetSample> assemble_dataset(const std::vector<Program>& programs,
                                            const SplitFractions& splits, int jobs = 1);

/// dir/{split}/{id}.plank, dir/{split}/{id}.drawing.json, dir/{split}.jsonl
void write_dataset(const std::vector<DatasetSample>& samples, const std::string& dir);

struct DatasetStats {
  std::size_t samples = 0;
  std::map<int, std::size_t> planks;       ///< plank count -> samples
  std::map<int, std::size_t> edges;        ///< edge count bucket (width 25) -> samples
  std::map<int, std::size_t> hidden_pct;   ///< hidden percentage bucket (width 10) -> samples
  double mean_hidden_fraction = 0.0;
  double mean_edges = 0.0;
  double mean_planks = 0.0;
};

DatasetStats dataset_stats(const std::vector<std::pair<Program, DrawingSet>>& items);
/// Reads every {id}.plank / {id}.drawing.json pair below `dir`.
DatasetStats dataset_stats(const std::string& dir);
std::string stats_to_json(const DatasetStats& s);
std::string stats_table(const DatasetStats& s);

// export.cpp
/// Wavefront OBJ, 8 vertices and 12 triangles per box.
std::string boxes_to_obj(std::span<const Box> boxes);

}  // namespace plankforge

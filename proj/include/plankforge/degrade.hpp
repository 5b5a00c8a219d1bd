#pragma once

#include <cstdint>

#include "plankforge/projector.hpp"

namespace plankforge {

struct NoiseConfig {
  double ratio = 0.0;           ///< fraction of all edges selected
  double delete_prob = 0.5;     ///< selected edge is deleted with this probability
  double max_shift_frac = 0.1;  ///< endpoint shift bound, fraction of edge length
  std::uint64_t seed = 0;

  void check() const;
};

struct NoiseReport {
  std::size_t selected = 0;
  std::size_t deleted = 0;
  std::size_t perturbed = 0;
  std::size_t degenerate = 0;  ///< perturbed edges that collapsed and were removed
};

/// Delete or slide a random subset of edges. Output is not re-normalized.
DrawingSet inject_noise(const DrawingSet& d, const NoiseConfig& c, NoiseReport* report = nullptr);

/// Keep visible edges only.
DrawingSet strip_hidden(const DrawingSet& d);

}  // namespace plankforge

#pragma once

#include <string>
#include <vector>

#include "plankforge/datagen.hpp"
#include "plankforge/program.hpp"
#include "plankforge/rng.hpp"

namespace fixtures {

// Reference cabinet, subscripts written as name_k.
inline const std::string kListing =
    "bbox = Cuboid(-0.35, -0.23, -0.76, 0.35, 0.23, 0.76)\n"
    "plank1 = Cuboid(bbox_1, bbox_2, bbox_3, -0.34, bbox_5, bbox_6)\n"
    "plank2 = Cuboid(0.34, bbox_2, bbox_3, bbox_4, bbox_5, bbox_6)\n"
    "plank3 = Cuboid(plank1_4, bbox_2, -0.70, plank2_1, bbox_5, -0.69)\n"
    "plank4 = Cuboid(plank1_4, bbox_2, 0.75, plank2_1, bbox_5, bbox_6)\n"
    "plank5 = Cuboid(plank1_4, 0.21, plank3_6, plank2_1, 0.22, plank4_3)\n"
    "plank6 = Cuboid(plank1_4, bbox_2, bbox_3, plank2_1, -0.21, plank3_3)\n"
    "plank7 = Cuboid(plank1_4, 0.21, bbox_3, plank2_1, bbox_5, plank3_3)\n";

inline plankforge::Program listing() { return plankforge::parse_program(kListing); }

// Box with corners drawn uniformly from [lo, hi], each extent at least `min_ext`.
inline plankforge::Box random_box(plankforge::Rng& rng, double lo, double hi, double min_ext) {
  plankforge::Box b;
  for (int a = 0; a < 3; ++a) {
    const double x0 = rng.uniform(lo, hi - min_ext);
    const double x1 = rng.uniform(x0 + min_ext, hi);
    b.lo[a] = x0;
    b.hi[a] = x1;
  }
  return b;
}

// Box snapped to a coarse integer grid, so coincidences are common.
inline plankforge::Box random_grid_box(plankforge::Rng& rng, int cells, double unit) {
  plankforge::Box b;
  for (int a = 0; a < 3; ++a) {
    const auto i0 = rng.uniform_int(0, cells - 1);
    const auto i1 = rng.uniform_int(i0 + 1, cells);
    b.lo[a] = -1.0 + static_cast<double>(i0) * unit;
    b.hi[a] = -1.0 + static_cast<double>(i1) * unit;
  }
  return b;
}

inline std::vector<plankforge::Program> cabinets(std::size_t n, std::uint64_t seed) {
  plankforge::GenConfig c;
  c.seed = seed;
  return plankforge::generate_programs(n, c, 1);
}

}  // namespace fixtures

#include <cstdio>
#include <sstream>

#include "plankforge/datagen.hpp"

namespace plankforge {

std::string boxes_to_obj(std::span<const Box> boxes) {
  std::ostringstream out;
  char buf[128];
  // corner n has x from bit 0, y from bit 1, z from bit 2
  static constexpr int kTris[12][3] = {
      {0, 2, 3}, {0, 3, 1},  // z min
      {4, 5, 7}, {4, 7, 6},  // z max
      {0, 1, 5}, {0, 5, 4},  // y min
      {2, 6, 7}, {2, 7, 3},  // y max
      {0, 4, 6}, {0, 6, 2},  // x min
      {1, 3, 7}, {1, 7, 5},  // x max
  };
  std::size_t base = 1;
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    out << "o plank" << b + 1 << '\n';
    for (int n = 0; n < 8; ++n) {
      std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", (n & 1) ? boxes[b].hi[0] : boxes[b].lo[0],
                    (n & 2) ? boxes[b].hi[1] : boxes[b].lo[1], (n & 4) ? boxes[b].hi[2] : boxes[b].lo[2]);
      out << buf;
    }
    for (const auto& t : kTris) {
      out << "f " << base + t[0] << ' ' << base + t[1] << ' ' << base + t[2] << '\n';
    }
    base += 8;
  }
  return out.str();
}

}  // namespace plankforge

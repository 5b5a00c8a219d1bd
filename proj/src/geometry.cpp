#include "plankforge/geometry.hpp"

#include <algorithm>

namespace plankforge {

std::string_view dof_name(Dof d) {
  static constexpr std::array<std::string_view, 6> names = {"x_min", "y_min", "z_min",
                                                            "x_max", "y_max", "z_max"};
  return names[index_of(d)];
}

double Box::volume() const {
  return std::max(0.0, hi[0] - lo[0]) * std::max(0.0, hi[1] - lo[1]) *
         std::max(0.0, hi[2] - lo[2]);
}

bool Box::has_positive_volume() const {
  return lo[0] < hi[0] && lo[1] < hi[1] && lo[2] < hi[2];
}

double intersection_volume(const Box& a, const Box& b) {
  double v = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double len = std::min(a.hi[i], b.hi[i]) - std::max(a.lo[i], b.lo[i]);
    if (len <= 0.0) return 0.0;
    v *= len;
  }
  return v;
}

Box bounding_union(const Box& a, const Box& b) {
  Box r;
  for (int i = 0; i < 3; ++i) {
    r.lo[i] = std::min(a.lo[i], b.lo[i]);
    r.hi[i] = std::max(a.hi[i], b.hi[i]);
  }
  return r;
}

Axis thickness_axis(const Box& b) {
  Axis best = Axis::X;
  for (Axis a : {Axis::Y, Axis::Z}) {
    if (b.extent(a) < b.extent(best)) best = a;
  }
  return best;
}

}  // namespace plankforge

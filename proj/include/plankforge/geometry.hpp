#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace plankforge {

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

/// One of the six boundary coordinates of an axis-aligned cuboid, in the
/// canonical order x_min, y_min, z_min, x_max, y_max, z_max.
enum class Dof : std::uint8_t { XMin = 0, YMin, ZMin, XMax, YMax, ZMax };

inline constexpr int kDofCount = 6;

constexpr Axis axis_of(Dof d) { return static_cast<Axis>(static_cast<int>(d) % 3); }
constexpr bool is_max(Dof d) { return static_cast<int>(d) >= 3; }
constexpr Dof opposite(Dof d) { return static_cast<Dof>((static_cast<int>(d) + 3) % 6); }
constexpr Dof dof_of(Axis a, bool max_side) {
  return static_cast<Dof>(static_cast<int>(a) + (max_side ? 3 : 0));
}
constexpr int index_of(Dof d) { return static_cast<int>(d); }
constexpr int index_of(Axis a) { return static_cast<int>(a); }

std::string_view dof_name(Dof d);

/// Axis-aligned box. `lo[a] < hi[a]` is expected but not enforced here.
struct Box {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};

  static Box from_dofs(const std::array<double, 6>& v) {
    return Box{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
  }
  std::array<double, 6> dofs() const { return {lo[0], lo[1], lo[2], hi[0], hi[1], hi[2]}; }
  double dof(Dof d) const { return is_max(d) ? hi[index_of(axis_of(d))] : lo[index_of(axis_of(d))]; }

  double extent(Axis a) const { return hi[index_of(a)] - lo[index_of(a)]; }
  double volume() const;
  bool has_positive_volume() const;

  friend bool operator==(const Box&, const Box&) = default;
};

double intersection_volume(const Box& a, const Box& b);
Box bounding_union(const Box& a, const Box& b);

/// Axis with the smallest extent; ties go to the earlier axis.
Axis thickness_axis(const Box& b);

}  // namespace plankforge

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prs/common.hpp"

namespace prs {

/// Axis-aligned rectangle [min_x, max_x] x [min_y, max_y].
struct Box {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }
};

/// Union of equal-radius closed disks in the free plane.
class DiskUnion {
 public:
  DiskUnion(std::vector<Point> centers, double radius);

  const std::vector<Point>& centers() const { return centers_; }
  double radius() const { return radius_; }
  std::size_t count() const { return centers_.size(); }
  bool empty() const { return centers_.empty(); }

  /// Tight bounding box of the union; degenerate (zero area) when empty.
  Box bounding_box() const;

  bool contains(Point p) const;

  /// Same centers multiplied by `factor` about the origin; radius unchanged.
  DiskUnion scaled_centers(double factor) const;

 private:
  std::vector<Point> centers_;
  double radius_;
};

struct AreaEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 1;
};

/// Intersection area of two radius-R disks whose centers are `dist` apart.
double lens_area(double radius, double dist);

/// Area of the union of two radius-R disks whose centers are `dist` apart.
double two_disk_union_area(double radius, double dist);

bool point_in_union(const DiskUnion& u, Point p);

/// Hit-or-miss estimate over the tight bounding box of `u`.
AreaEstimate union_area_mc(const DiskUnion& u, std::uint64_t samples, Rng& rng);

/// Uniform point on the union by rejection from the bounding box.
/// Requires a nonempty union.
Point uniform_point_in_union(const DiskUnion& u, Rng& rng);

/// Uniform point on the closed disk of radius `radius` around `center`.
Point uniform_point_in_disk(Point center, double radius, Rng& rng);

/// Radius of the open disk {x : lens_area(R, |x|) > t}, clipped to [0, 2R].
/// Computed by bisection to an absolute tolerance of 1e-12 R.
double level_set_radius(double radius, double t);

}  // namespace prs

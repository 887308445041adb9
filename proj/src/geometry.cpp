#include "prs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace prs {

namespace {

void require_radius(double radius) {
  if (!std::isfinite(radius) || radius <= 0.0) {
    throw InvalidParameter("radius must be a positive finite number");
  }
}

void require_distance(double dist) {
  if (!(dist >= 0.0)) {
    throw InvalidParameter("distance must be nonnegative");
  }
}

}  // namespace

DiskUnion::DiskUnion(std::vector<Point> centers, double radius)
    : centers_(std::move(centers)), radius_(radius) {
  require_radius(radius);
  for (const Point& c : centers_) {
    if (!std::isfinite(c.x) || !std::isfinite(c.y)) {
      throw InvalidParameter("disk centers must be finite");
    }
  }
}

Box DiskUnion::bounding_box() const {
  if (centers_.empty()) return {};
  Box box{centers_.front().x, centers_.front().y, centers_.front().x,
          centers_.front().y};
  for (const Point& c : centers_) {
    box.min_x = std::min(box.min_x, c.x);
    box.min_y = std::min(box.min_y, c.y);
    box.max_x = std::max(box.max_x, c.x);
    box.max_y = std::max(box.max_y, c.y);
  }
  box.min_x -= radius_;
  box.min_y -= radius_;
  box.max_x += radius_;
  box.max_y += radius_;
  return box;
}

bool DiskUnion::contains(Point p) const {
  const double r2 = radius_ * radius_;
  return std::any_of(centers_.begin(), centers_.end(),
                     [&](Point c) { return squared_distance(p, c) <= r2; });
}

DiskUnion DiskUnion::scaled_centers(double factor) const {
  std::vector<Point> scaled;
  scaled.reserve(centers_.size());
  for (const Point& c : centers_) scaled.push_back({c.x * factor, c.y * factor});
  return DiskUnion(std::move(scaled), radius_);
}

double lens_area(double radius, double dist) {
  require_radius(radius);
  require_distance(dist);
  if (dist >= 2.0 * radius) return 0.0;
  const double half_angle = std::acos(dist / (2.0 * radius));
  return 2.0 * radius * radius * half_angle -
         0.5 * dist * std::sqrt(4.0 * radius * radius - dist * dist);
}

double two_disk_union_area(double radius, double dist) {
  return 2.0 * std::numbers::pi * radius * radius - lens_area(radius, dist);
}

bool point_in_union(const DiskUnion& u, Point p) { return u.contains(p); }

AreaEstimate union_area_mc(const DiskUnion& u, std::uint64_t samples, Rng& rng) {
  if (samples == 0) throw InvalidParameter("samples must be at least 1");
  if (u.empty()) return {0.0, 0.0, samples};

  const Box box = u.bounding_box();
  std::uniform_real_distribution<double> ux(box.min_x, box.max_x);
  std::uniform_real_distribution<double> uy(box.min_y, box.max_y);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    if (u.contains({x, y})) ++hits;
  }
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / n;
  return {box.area() * p, box.area() * std::sqrt(p * (1.0 - p) / n), samples};
}

Point uniform_point_in_union(const DiskUnion& u, Rng& rng) {
  if (u.empty()) throw InvalidParameter("cannot sample from an empty union");
  const Box box = u.bounding_box();
  std::uniform_real_distribution<double> ux(box.min_x, box.max_x);
  std::uniform_real_distribution<double> uy(box.min_y, box.max_y);
  for (;;) {
    const double x = ux(rng);
    const double y = uy(rng);
    if (u.contains({x, y})) return {x, y};
  }
}

Point uniform_point_in_disk(Point center, double radius, Rng& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (;;) {
    const double x = unit(rng);
    const double y = unit(rng);
    if (x * x + y * y <= 1.0) {
      return {center.x + radius * x, center.y + radius * y};
    }
  }
}

double level_set_radius(double radius, double t) {
  require_radius(radius);
  if (!(t >= 0.0)) throw InvalidParameter("level t must be nonnegative");
  if (t == 0.0) return 2.0 * radius;
  if (t >= std::numbers::pi * radius * radius) return 0.0;

  // lens_area(R, lo) > t >= lens_area(R, hi) throughout.
  double lo = 0.0;
  double hi = 2.0 * radius;
  const double tol = 1e-12 * radius;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (lens_area(radius, mid) > t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace prs

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "prs/geometry.hpp"

using namespace prs;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt3 = std::numbers::sqrt3;
}  // namespace

TEST_CASE("lens_area closed-form values") {
  CHECK(lens_area(1.0, 0.0) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(lens_area(1.0, 2.0) == 0.0);
  CHECK(lens_area(1.0, 5.0) == 0.0);
  // 2 acos(1/2) - sqrt(3)/2
  CHECK(lens_area(1.0, 1.0) == doctest::Approx(2.0 * kPi / 3.0 - kSqrt3 / 2.0).epsilon(1e-14));

  for (double r : {0.1, 0.01, 0.37}) {
    const double big = 2.0 * r;
    const double lens = lens_area(big, big);
    CHECK(std::abs(lens - (8.0 * kPi / 3.0 - 2.0 * kSqrt3) * r * r) <= 1e-12 * r * r);
    const double pair = 2.0 * kPi * big * big - lens;
    CHECK(std::abs(pair - (16.0 * kPi / 3.0 + 2.0 * kSqrt3) * r * r) <= 1e-12 * r * r);
  }
}

TEST_CASE("lens_area rejects bad parameters") {
  CHECK_THROWS_AS(lens_area(0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(lens_area(-1.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(lens_area(std::nan(""), 1.0), InvalidParameter);
  CHECK_THROWS_AS(lens_area(INFINITY, 1.0), InvalidParameter);
  CHECK_THROWS_AS(lens_area(1.0, -0.5), InvalidParameter);
  CHECK_THROWS_AS(two_disk_union_area(0.0, 1.0), InvalidParameter);
}

TEST_CASE("lens_area is nonincreasing and two-disk union nondecreasing in distance") {
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    double d1 = u(rng);
    double d2 = u(rng);
    if (d1 > d2) std::swap(d1, d2);
    CHECK(lens_area(1.0, d1) >= lens_area(1.0, d2));
    CHECK(two_disk_union_area(1.0, d1) <= two_disk_union_area(1.0, d2));
  }
}

TEST_CASE("two_disk_union_area examples") {
  const double r = 0.05;
  CHECK(two_disk_union_area(2 * r, 2 * r) ==
        doctest::Approx((16.0 * kPi / 3.0 + 2.0 * kSqrt3) * r * r).epsilon(1e-12));
  CHECK(two_disk_union_area(1.0, 0.0) == doctest::Approx(kPi));
  CHECK(two_disk_union_area(1.0, 3.0) == doctest::Approx(2.0 * kPi));
}

TEST_CASE("point_in_union uses closed disks") {
  const DiskUnion one({{0.0, 0.0}}, 1.0);
  CHECK(point_in_union(one, {0.0, 0.0}));
  CHECK_FALSE(point_in_union(one, {2.0, 0.0}));
  CHECK(point_in_union(one, {1.0, 0.0}));
  const DiskUnion two({{0.0, 0.0}, {3.0, 0.0}}, 1.0);
  CHECK(point_in_union(two, {3.5, 0.0}));
  CHECK_FALSE(point_in_union(two, {1.5, 0.0}));
  CHECK_FALSE(point_in_union(DiskUnion({}, 1.0), {0.0, 0.0}));
  CHECK_THROWS_AS(DiskUnion({{0.0, 0.0}}, 0.0), InvalidParameter);
}

TEST_CASE("union_area_mc on an empty union is exactly zero") {
  Rng rng(1);
  const AreaEstimate est = union_area_mc(DiskUnion({}, 1.0), 100, rng);
  CHECK(est.value == 0.0);
  CHECK(est.std_error == 0.0);
  CHECK_THROWS_AS(union_area_mc(DiskUnion({{0, 0}}, 1.0), 0, rng), InvalidParameter);
}

TEST_CASE("union_area_mc matches single and two-disk closed forms") {
  const double r = 0.05;
  Rng rng(11);
  const AreaEstimate single = union_area_mc(DiskUnion({{0.3, 0.3}}, 2 * r), 1'000'000, rng);
  CHECK(std::abs(single.value - 4.0 * kPi * r * r) <= 3.0 * single.std_error);

  const AreaEstimate pair =
      union_area_mc(DiskUnion({{0.0, 0.0}, {0.0, 2 * r}}, 2 * r), 1'000'000, rng);
  const double exact = (16.0 * kPi / 3.0 + 2.0 * kSqrt3) * r * r;
  CHECK(std::abs(pair.value - exact) <= 3.0 * pair.std_error);
}

TEST_CASE("union_area_mc error bars cover closed forms in 99% of trials") {
  Rng rng(12);
  std::uniform_real_distribution<double> dist(0.0, 2.5);
  int covered = 0;
  constexpr int kTrials = 500;
  for (int t = 0; t < kTrials; ++t) {
    const bool two = t % 2 == 1;
    const double d = dist(rng);
    const DiskUnion u = two ? DiskUnion({{0.0, 0.0}, {d, 0.0}}, 1.0) : DiskUnion({{d, -d}}, 1.0);
    const double exact = two ? two_disk_union_area(1.0, d) : kPi;
    const AreaEstimate est = union_area_mc(u, 10'000, rng);
    if (std::abs(est.value - exact) <= 4.0 * est.std_error) ++covered;
  }
  CHECK(covered >= 495);
}

TEST_CASE("union_area_mc agrees with grid quadrature on random three-disk unions") {
  Rng rng(13);
  std::uniform_real_distribution<double> coord(0.0, 2.5);
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<Point> centers{{coord(rng), coord(rng)},
                               {coord(rng), coord(rng)},
                               {coord(rng), coord(rng)}};
    const double radius = 1.0;
    const double quad = oracle::grid_union_area(centers, radius, radius / 200.0);
    const AreaEstimate est = union_area_mc(DiskUnion(centers, radius), 1'000'000, rng);
    // Midpoint error on smooth boundaries is far below h * perimeter; 1e-3
    // relative is generous at h = R/200.
    CHECK(std::abs(est.value - quad) <= 4.0 * est.std_error + 1e-3 * quad);
  }
}

TEST_CASE("uniform_point_in_union") {
  Rng rng(21);
  SUBCASE("single disk is centered") {
    const DiskUnion u({{0.4, -0.2}}, 0.5);
    constexpr int n = 100'000;
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
      const Point p = uniform_point_in_union(u, rng);
      REQUIRE(point_in_union(u, p));
      sx += p.x;
      sy += p.y;
    }
    // Var of one coordinate on a disk of radius R is R^2 / 4.
    const double sigma = 0.5 / 2.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sx / n - 0.4) <= 3.0 * sigma);
    CHECK(std::abs(sy / n + 0.2) <= 3.0 * sigma);
  }
  SUBCASE("two disjoint disks split evenly") {
    const DiskUnion u({{0.0, 0.0}, {5.0, 1.0}}, 1.0);
    constexpr int n = 100'000;
    int first = 0;
    for (int i = 0; i < n; ++i) {
      const Point p = uniform_point_in_union(u, rng);
      REQUIRE(point_in_union(u, p));
      if (squared_distance(p, {0.0, 0.0}) <= 1.0) ++first;
    }
    const double sigma = 0.5 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(first) / n - 0.5) <= 3.0 * sigma);
  }
  SUBCASE("outputs always lie in an overlapping union") {
    const DiskUnion u({{0.0, 0.0}, {0.7, 0.2}, {-0.3, 0.9}}, 0.6);
    for (int i = 0; i < 20'000; ++i) REQUIRE(point_in_union(u, uniform_point_in_union(u, rng)));
  }
  CHECK_THROWS_AS(uniform_point_in_union(DiskUnion({}, 1.0), rng), InvalidParameter);
}

TEST_CASE("level_set_radius") {
  CHECK(level_set_radius(1.0, 0.0) == 2.0);
  CHECK(level_set_radius(1.0, kPi) == 0.0);
  CHECK(level_set_radius(1.0, 10.0) == 0.0);
  CHECK(level_set_radius(1.0, lens_area(1.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK_THROWS_AS(level_set_radius(1.0, -1.0), InvalidParameter);

  // Inverse of lens_area on the open interval (0, 2R).
  Rng rng(3);
  for (double radius : {1.0, 0.1, 0.02}) {
    std::uniform_real_distribution<double> d(1e-6 * radius, 2.0 * radius * (1 - 1e-6));
    for (int i = 0; i < 200; ++i) {
      const double dist = d(rng);
      CHECK(std::abs(level_set_radius(radius, lens_area(radius, dist)) - dist) <= 1e-9 * radius);
    }
  }
}

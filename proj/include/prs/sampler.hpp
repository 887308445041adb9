#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prs/common.hpp"
#include "prs/geometry.hpp"

namespace prs {

enum class Boundary { clipped_square, torus };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

inline constexpr std::uint64_t kDefaultMaxRounds = 10'000;
inline constexpr std::uint64_t kRejectionAttemptCap = 10'000'000;

/// Hard disks of radius r whose centers come from a Poisson process of
/// intensity lambda / (pi r^2) on the unit square.
struct ModelParams {
  double lambda = 0.1;
  double r = 0.05;
  std::uint64_t max_rounds = kDefaultMaxRounds;
  Boundary boundary = Boundary::clipped_square;

  double intensity() const;
  /// Throws InvalidParameter on nonpositive or non-finite lambda/r or a zero
  /// round cap.
  void validate() const;
  /// True when r >= 1/4, where the grid degenerates to a single cell.
  bool radius_is_large() const { return r >= 0.25; }

  /// key=value lines, one per field.
  std::string to_key_value() const;
  static ModelParams from_key_value(const std::string& text);
};

struct PointSet {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// "x,y" header followed by one row per point, full round-trip precision.
std::string to_csv(const PointSet& ps);

/// Uniform bucket grid over [0,1]^2 with n x n cells of side 1/n >= min_side,
/// so any two points closer than min_side lie in the same or adjacent cells.
class Grid {
 public:
  Grid(std::span<const Point> points, double min_side, Boundary boundary);

  int cells_per_side() const { return n_; }
  double cell_side() const { return side_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(n_) * n_; }

  int cell_coord(double v) const;
  std::size_t cell_index(int cx, int cy) const {
    return static_cast<std::size_t>(cy) * n_ + cx;
  }
  std::size_t cell_of(Point p) const {
    return cell_index(cell_coord(p.x), cell_coord(p.y));
  }

  /// Indices of the points stored in cell `cell`.
  std::span<const std::uint32_t> bucket(std::size_t cell) const;

  /// Distinct cells in the 3x3 neighborhood of (cx, cy); wraps on the torus.
  std::vector<std::size_t> neighborhood(int cx, int cy) const;

  /// Calls f(i, j) once for every unordered pair i < j whose squared
  /// distance (torus metric when applicable) is below `max_dist2`.
  void for_each_close_pair(std::span<const Point> points, double max_dist2,
                           const std::function<void(std::uint32_t, std::uint32_t)>& f) const;

 private:
  int n_;
  double side_;
  Boundary boundary_;
  std::vector<std::uint32_t> offsets_;  // CSR layout, size cell_count + 1
  std::vector<std::uint32_t> items_;
};

Grid build_grid(const PointSet& points, double cell_side,
                Boundary boundary = Boundary::clipped_square);

/// Distance under the given boundary convention.
double boundary_squared_distance(Point a, Point b, Boundary boundary);

struct BadPairReport {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // i < j, sorted
  std::vector<std::uint32_t> bad_points;                       // sorted, unique
  std::uint64_t k = 0;
};

BadPairReport find_bad_pairs(const PointSet& points, const ModelParams& params);

/// O(n^2) reference used by tests and the acceptance suite.
BadPairReport find_bad_pairs_brute_force(const PointSet& points,
                                         const ModelParams& params);

/// Union of closed radius-2r disks around the bad points, restricted to the
/// unit square, together with the grid cells that cover it.
class ResamplingSet {
 public:
  ResamplingSet(std::vector<Point> centers, const ModelParams& params);

  const std::vector<Point>& centers() const { return centers_; }
  double radius() const { return radius_; }
  const std::vector<std::size_t>& covering_cells() const { return covering_cells_; }
  double covering_area() const;
  double cell_side() const { return grid_.cell_side(); }
  const Grid& grid() const { return grid_; }
  Boundary boundary() const { return boundary_; }

  /// Closed-disk membership: some center within distance 2r.
  bool contains(Point p) const;

  /// Lower-left corner of covering cell `cell`.
  Point cell_origin(std::size_t cell) const;

 private:
  std::vector<Point> centers_;
  double radius_;
  Boundary boundary_;
  Grid grid_;  // buckets the centers
  std::vector<std::size_t> covering_cells_;
};

ResamplingSet build_resampling_set(const BadPairReport& report,
                                   const PointSet& points,
                                   const ModelParams& params);

/// Clipped Area(S_t) by hit-or-miss over the covering cells.
AreaEstimate resampling_set_area_mc(const ResamplingSet& set, std::uint64_t samples,
                                    Rng& rng);

PointSet sample_poisson_square(const ModelParams& params, Rng& rng);

/// Keeps the points outside `set` and adds a fresh Poisson process of the
/// model intensity restricted to `set`. Draw order: the count over the
/// covering cells, then per candidate (cell, x, y).
PointSet resample_step(const PointSet& points, const ResamplingSet& set,
                       const ModelParams& params, Rng& rng);

/// As above on the domain [0,1]^2 minus `excluded`: fresh points landing in
/// `excluded` are dropped (nullptr means no exclusion).
PointSet resample_step(const PointSet& points, const ResamplingSet& set,
                       const ModelParams& params, Rng& rng, const ResamplingSet* excluded);

struct RunStats {
  std::uint64_t rounds = 0;
  std::vector<std::uint64_t> k_history;          // k_0 .. k_T
  std::vector<std::uint64_t> n_history;          // |P_0| .. |P_T|
  std::vector<double> resample_area_history;     // covering area, rounds 0 .. T-1
  std::uint64_t seed = 0;
  bool converged = false;
};

/// Called once per resampling round with the configuration, its bad pairs and
/// the resampling set about to be used.
using RoundObserver = std::function<void(std::uint64_t round, const PointSet&,
                                         const BadPairReport&, const ResamplingSet&)>;

struct PrsResult {
  PointSet points;
  RunStats stats;
};

PrsResult prs_sample(const ModelParams& params, Rng& rng,
                     const RoundObserver& observer = {});

/// PRS for hard disks on [0,1]^2 minus `excluded`. Gives the law of the
/// points outside a resampling set given the bad points that define it.
PrsResult prs_sample_outside(const ModelParams& params, const ResamplingSet& excluded, Rng& rng);

/// Seeds a fresh engine with `seed` and records it in the stats.
PrsResult prs_sample_seeded(const ModelParams& params, std::uint64_t seed,
                            const RoundObserver& observer = {});

struct RejectionResult {
  PointSet points;
  std::uint64_t attempts = 0;
};

/// Redraws whole Poisson configurations until one has no bad pair.
/// Throws Infeasible after `max_attempts` failures.
RejectionResult rejection_sample_counted(const ModelParams& params, Rng& rng,
                                         std::uint64_t max_attempts = kRejectionAttemptCap);

PointSet rejection_sample(const ModelParams& params, Rng& rng);

}  // namespace prs

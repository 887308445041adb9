#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prs/common.hpp"
#include "prs/geometry.hpp"
#include "prs/sampler.hpp"

namespace prs {

/// Acceptance slack for one-sided comparisons, in standard errors.
inline constexpr double kPassSigmas = 3.0;
/// Margins below this are hard failures; (-4, -3) is only suspicious.
inline constexpr double kHardFailSigmas = 4.0;

/// Outcome of a stochastic comparison lhs >= rhs (or lhs == rhs for
/// two-sided checks).
struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double lhs_sigma = 0.0;
  double rhs_sigma = 0.0;
  /// Standard error of lhs - rhs.
  double sigma = 0.0;
  double margin_sigmas = 0.0;
  bool passed = false;

  bool suspicious() const { return margin_sigmas < -kPassSigmas && !hard_failure(); }
  bool hard_failure() const { return margin_sigmas < -kHardFailSigmas; }
  /// |lhs - rhs| within `sigmas` standard errors.
  bool agrees_within(double sigmas) const;
};

/// Builds a check from its difference and the standard error of that
/// difference. A zero sigma yields margin 0 when the sides agree to rounding
/// and +-infinity otherwise.
InequalityCheck make_check(std::string name, double lhs, double lhs_sigma, double rhs,
                           double rhs_sigma, double diff_sigma);

/// Area of the union of unit disks at gamma-scaled centers (lhs) versus the
/// original centers (rhs).
InequalityCheck check_fact_monotonicity(const std::vector<Point>& centers, double gamma,
                                        std::uint64_t samples, Rng& rng);

/// For C = u (disks of radius 2r): lhs = 1/2 Area(C)^2 P[|X-Y| <= 2r] with X, Y
/// uniform on C; rhs = 1/2 Area(C)/(4 pi r^2) times the same integral over a
/// single 2r-disk.
InequalityCheck check_lemma_inequality(const DiskUnion& u, std::uint64_t pair_samples,
                                       std::uint64_t area_samples, Rng& rng);

struct LevelSetReport {
  std::vector<double> t_values;
  std::vector<double> alpha;          // level-set radius over 2r, clamped to 1
  std::vector<double> pass_fraction;  // probes with f(probe) > t within 3 sigma
  bool passed = false;
};

/// For each t, checks that probes from the union of the shrunken disks
/// D_{2 alpha r}(x_i) satisfy Area(C n D_{2r}(probe)) > t. Passes when at least
/// 99% of the probes do for every t.
LevelSetReport check_level_sets(const DiskUnion& u, const std::vector<double>& t_values,
                                std::uint64_t probe_samples, Rng& rng,
                                std::uint64_t area_samples = 4000);

struct ContractionEstimate {
  std::uint64_t k_t = 0;
  double mean_k_next = 0.0;
  double k_next_std_error = 0.0;
  std::uint64_t replications = 0;
  double bound = 0.0;
  /// Ordered close pairs (x, y) in P_{t+1}^2, x != y, with x in S_t.
  double j_mean = 0.0;
  /// Ordered close pairs with both x and y in S_t.
  double l_mean = 0.0;
  /// Standard error of the per-replication k_next - (j - l/2).
  double identity_std_error = 0.0;
  double area_covering = 0.0;

  bool within_bound(double sigmas = kPassSigmas) const {
    return mean_k_next <= bound + sigmas * k_next_std_error;
  }
};

enum class ContractionMode {
  /// E[k_{t+1} | BadPoints(P_t)]: each replication redraws the points outside
  /// S_t from the hard-disk law on [0,1]^2 \ S_t, then a fresh Poisson
  /// process on S_t.
  given_bad_points,
  /// E[k_{t+1} | P_t]: the points of `state` outside S_t are kept as they are.
  /// Individual states can exceed the averaged bound.
  given_state,
};

/// Resamples the resampling set of `state` `replications` times, holding the
/// bad points fixed, and averages the resulting bad-pair counts.
ContractionEstimate measure_contraction(const PointSet& state, const ModelParams& params,
                                        std::uint64_t replications, Rng& rng,
                                        ContractionMode mode = ContractionMode::given_bad_points);

/// MC estimate of P[|X - Y| <= threshold_factor * r] for X, Y uniform on a
/// disk of radius 2r, against 1 - 3 sqrt(3) / (4 pi) (threshold 2r) or 1
/// (threshold >= 4r).
InequalityCheck verify_pair_probability(double r, std::uint64_t samples, Rng& rng,
                                        double threshold_factor = 2.0);

// Batch drivers shared by the CLI and the acceptance suite. Each item of a
// batch draws from its own stream split from `master_seed`.

/// Up to 8 centers uniform in [-2, 2]^2 (unit disks).
std::vector<Point> random_fact_configuration(Rng& rng);

/// Up to 6 radius-2r disks with centers uniform in a square of side 8r, so
/// most configurations overlap.
DiskUnion random_lemma_configuration(double r, Rng& rng);

/// `count` monotonicity checks cycling gamma through {1.1, 1.5, 2.0}.
std::vector<InequalityCheck> run_fact_suite(std::size_t count, std::uint64_t samples,
                                            std::uint64_t master_seed);

std::vector<InequalityCheck> run_lemma_suite(std::size_t count, double r,
                                             std::uint64_t pair_samples,
                                             std::uint64_t area_samples,
                                             std::uint64_t master_seed);

/// Configurations with at least one bad pair, visited by PRS trajectories
/// started from successive seeds. Takes the first state of each trajectory and
/// then later ones, so both crowded and nearly valid states appear.
std::vector<PointSet> collect_bad_states(const ModelParams& params, std::size_t count,
                                         std::uint64_t master_seed);

}  // namespace prs

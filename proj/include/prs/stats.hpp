#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace prs {

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::size_t bins = 0;  // after merging
};

/// Two-sample chi-square test of homogeneity on integer-valued samples.
/// Adjacent values are pooled so every bin has a pooled expected count of at
/// least `min_expected` in each sample.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b,
                                      double min_expected = 5.0);

struct MeanStat {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;
  std::size_t n = 0;
};

MeanStat mean_stat(std::span<const double> values);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace prs

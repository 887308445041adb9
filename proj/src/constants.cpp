#include "prs/constants.hpp"

#include <cmath>
#include <numbers>

#include "prs/common.hpp"

namespace prs {

ContractionConstants compute_constants() {
  constexpr double pi = std::numbers::pi;
  constexpr double sqrt3 = std::numbers::sqrt3;

  // Half the double integral of 1{|x-y| <= 2r} over D_{2r} x D_{2r}, times
  // lambda_r^2, equals (8 - 6 sqrt3 / pi) lambda^2, i.e. the full integral is
  // 2 (8 - 6 sqrt3 / pi) pi^2 r^4. Dividing by Area(D_{2r})^2 = 16 pi^2 r^4
  // leaves a scale-free probability.
  const double half_integral_coeff = 8.0 - 6.0 * sqrt3 / pi;
  const double pair_prob = 2.0 * half_integral_coeff / 16.0;

  const double pair_union = 16.0 * pi / 3.0 + 2.0 * sqrt3;
  const double kprime = (4.0 * pi + 3.0 * sqrt3) / (2.0 * pi * pi);

  return ContractionConstants{
      .pair_prob = pair_prob,
      .pair_union_coeff = pair_union,
      .kprime_coeff = kprime,
      .lambda_bar = 1.0 / std::sqrt(pair_union * kprime),
      .gj_lambda_bar = 0.21027,
      .conjectured_lambda = 0.5,
  };
}

double contraction_bound(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw InvalidParameter("lambda must be a positive finite number");
  }
  const ContractionConstants c = compute_constants();
  return c.pair_union_coeff * c.kprime_coeff * lambda * lambda;
}

}  // namespace prs

#pragma once

namespace prs {

/// Constants of the per-round contraction estimate for the expected number of
/// bad pairs, E[k_{t+1}] <= pair_union_coeff * kprime_coeff * lambda^2 * k_t.
struct ContractionConstants {
  /// P[|X - Y| <= R] for X, Y independent and uniform on a radius-R disk.
  double pair_prob;
  /// Area of D_{2r}(0) u D_{2r}(2r e_1) in units of r^2.
  double pair_union_coeff;
  /// Coefficient of Area(S_t) * lambda^2 / r^2 bounding the next bad-pair count.
  double kprime_coeff;
  /// Largest lambda for which the product bound is at most one.
  double lambda_bar;
  /// Previously published threshold (reference literal, not derived).
  double gj_lambda_bar;
  /// Threshold conjectured from simulations (reference literal).
  double conjectured_lambda;
};

ContractionConstants compute_constants();

/// pair_union_coeff * kprime_coeff * lambda^2.
double contraction_bound(double lambda);

}  // namespace prs

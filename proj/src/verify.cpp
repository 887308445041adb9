#include "prs/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "prs/constants.hpp"

namespace prs {

bool InequalityCheck::agrees_within(double sigmas) const {
  return std::abs(margin_sigmas) <= sigmas;
}

InequalityCheck make_check(std::string name, double lhs, double lhs_sigma, double rhs,
                           double rhs_sigma, double diff_sigma) {
  InequalityCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.lhs_sigma = lhs_sigma;
  c.rhs_sigma = rhs_sigma;
  c.sigma = diff_sigma;
  const double diff = lhs - rhs;
  if (diff_sigma > 0.0) {
    c.margin_sigmas = diff / diff_sigma;
  } else {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
    if (std::abs(diff) <= 1e-12 * scale) {
      c.margin_sigmas = 0.0;
    } else {
      c.margin_sigmas = diff > 0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
    }
  }
  c.passed = c.margin_sigmas >= -kPassSigmas;
  return c;
}

InequalityCheck check_fact_monotonicity(const std::vector<Point>& centers, double gamma,
                                        std::uint64_t samples, Rng& rng) {
  if (!std::isfinite(gamma) || gamma <= 1.0) {
    throw InvalidParameter("gamma must be greater than 1");
  }
  if (centers.empty()) throw InvalidParameter("need at least one center");
  const DiskUnion original(centers, 1.0);
  const DiskUnion expanded = original.scaled_centers(gamma);
  const AreaEstimate rhs = union_area_mc(original, samples, rng);
  const AreaEstimate lhs = union_area_mc(expanded, samples, rng);
  return make_check("fact_monotonicity", lhs.value, lhs.std_error, rhs.value, rhs.std_error,
                    std::hypot(lhs.std_error, rhs.std_error));
}

InequalityCheck check_lemma_inequality(const DiskUnion& u, std::uint64_t pair_samples,
                                       std::uint64_t area_samples, Rng& rng) {
  if (u.empty()) throw InvalidParameter("lemma check needs a nonempty union");
  if (pair_samples == 0) throw InvalidParameter("pair_samples must be at least 1");
  const double r = u.radius() / 2.0;
  const double reach2 = u.radius() * u.radius();

  const AreaEstimate area = union_area_mc(u, area_samples, rng);
  std::uint64_t close = 0;
  for (std::uint64_t i = 0; i < pair_samples; ++i) {
    const Point x = uniform_point_in_union(u, rng);
    const Point y = uniform_point_in_union(u, rng);
    if (squared_distance(x, y) <= reach2) ++close;
  }
  const double n = static_cast<double>(pair_samples);
  const double p = static_cast<double>(close) / n;
  const double p_sigma = std::sqrt(p * (1.0 - p) / n);

  const double q = compute_constants().pair_prob;
  const double a = area.value;
  const double sa = area.std_error;
  const double per_area = 2.0 * std::numbers::pi * r * r * q;  // rhs / Area(C)

  const double lhs = 0.5 * a * a * p;
  const double rhs = per_area * a;
  const double lhs_sigma = std::hypot(a * p * sa, 0.5 * a * a * p_sigma);
  const double rhs_sigma = per_area * sa;
  // lhs and rhs share the Area(C) estimate; propagate through the difference.
  const double diff_sigma = std::hypot((a * p - per_area) * sa, 0.5 * a * a * p_sigma);
  return make_check("lemma_inequality", lhs, lhs_sigma, rhs, rhs_sigma, diff_sigma);
}

LevelSetReport check_level_sets(const DiskUnion& u, const std::vector<double>& t_values,
                                std::uint64_t probe_samples, Rng& rng,
                                std::uint64_t area_samples) {
  if (u.empty()) throw InvalidParameter("level-set check needs a nonempty union");
  if (probe_samples == 0 || area_samples == 0) {
    throw InvalidParameter("sample counts must be at least 1");
  }
  constexpr double kShrink = 1e-6;
  const double big = u.radius();  // 2r
  const double r = big / 2.0;
  const double disk_area = std::numbers::pi * big * big;

  LevelSetReport report;
  report.t_values = t_values;
  report.passed = true;
  for (double t : t_values) {
    if (!(t >= 0.0) || t >= disk_area) {
      throw InvalidParameter("level t must lie in [0, 4 pi r^2)");
    }
    const double alpha = std::min(1.0, level_set_radius(big, t) / (2.0 * r));
    report.alpha.push_back(alpha);
    const double probe_radius = 2.0 * alpha * r * (1.0 - kShrink);
    if (probe_radius <= 0.0) {
      report.pass_fraction.push_back(1.0);
      continue;
    }
    const DiskUnion shrunk(u.centers(), probe_radius);
    std::uint64_t ok = 0;
    for (std::uint64_t i = 0; i < probe_samples; ++i) {
      const Point probe = uniform_point_in_union(shrunk, rng);
      std::uint64_t hits = 0;
      for (std::uint64_t s = 0; s < area_samples; ++s) {
        if (u.contains(uniform_point_in_disk(probe, big, rng))) ++hits;
      }
      const double m = static_cast<double>(area_samples);
      const double frac = static_cast<double>(hits) / m;
      const double f = disk_area * frac;
      const double f_sigma = disk_area * std::sqrt(frac * (1.0 - frac) / m);
      if (f + kPassSigmas * f_sigma > t) ++ok;
    }
    const double fraction = static_cast<double>(ok) / static_cast<double>(probe_samples);
    report.pass_fraction.push_back(fraction);
    if (fraction < 0.99) report.passed = false;
  }
  return report;
}

ContractionEstimate measure_contraction(const PointSet& state, const ModelParams& params,
                                        std::uint64_t replications, Rng& rng,
                                        ContractionMode mode) {
  params.validate();
  if (replications == 0) throw InvalidParameter("replications must be at least 1");
  const BadPairReport report = find_bad_pairs(state, params);
  if (report.k == 0) throw InvalidState("contraction needs a state with bad pairs");
  const ResamplingSet set = build_resampling_set(report, state, params);

  ContractionEstimate est;
  est.k_t = report.k;
  est.replications = replications;
  est.bound = contraction_bound(params.lambda) * static_cast<double>(report.k);
  est.area_covering = set.covering_area();

  const double reach = 2.0 * params.r;
  double sum_k = 0.0;
  double sum_k2 = 0.0;
  double sum_j = 0.0;
  double sum_l = 0.0;
  double sum_gap = 0.0;
  double sum_gap2 = 0.0;
  for (std::uint64_t m = 0; m < replications; ++m) {
    PointSet next;
    if (mode == ContractionMode::given_bad_points) {
      const PrsResult outside = prs_sample_outside(params, set, rng);
      if (!outside.stats.converged) {
        throw InvalidState("outside configuration did not converge within max_rounds");
      }
      next = resample_step(outside.points, set, params, rng);
    } else {
      next = resample_step(state, set, params, rng);
    }
    const Grid grid(next.points, reach, params.boundary);
    std::vector<char> in_set(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) in_set[i] = set.contains(next.points[i]);

    std::uint64_t k = 0;
    std::uint64_t j = 0;
    std::uint64_t l = 0;
    grid.for_each_close_pair(next.points, reach * reach, [&](std::uint32_t a, std::uint32_t b) {
      ++k;
      j += static_cast<std::uint64_t>(in_set[a]) + static_cast<std::uint64_t>(in_set[b]);
      if (in_set[a] && in_set[b]) l += 2;
    });
    const double kd = static_cast<double>(k);
    const double gap = kd - (static_cast<double>(j) - 0.5 * static_cast<double>(l));
    sum_k += kd;
    sum_k2 += kd * kd;
    sum_j += static_cast<double>(j);
    sum_l += static_cast<double>(l);
    sum_gap += gap;
    sum_gap2 += gap * gap;
  }
  const double n = static_cast<double>(replications);
  auto std_error = [n](double s, double s2) {
    if (n < 2) return 0.0;
    const double var = std::max(0.0, (s2 - s * s / n) / (n - 1.0));
    return std::sqrt(var / n);
  };
  est.mean_k_next = sum_k / n;
  est.k_next_std_error = std_error(sum_k, sum_k2);
  est.j_mean = sum_j / n;
  est.l_mean = sum_l / n;
  est.identity_std_error = std_error(sum_gap, sum_gap2);
  return est;
}

InequalityCheck verify_pair_probability(double r, std::uint64_t samples, Rng& rng,
                                        double threshold_factor) {
  if (!std::isfinite(r) || r <= 0.0) throw InvalidParameter("r must be positive");
  if (samples == 0) throw InvalidParameter("samples must be at least 1");
  double expected = 0.0;
  if (threshold_factor == 2.0) {
    expected = compute_constants().pair_prob;
  } else if (threshold_factor >= 4.0) {
    expected = 1.0;
  } else {
    throw InvalidParameter("threshold factor must be 2 or at least 4");
  }

  const double big = 2.0 * r;
  const double reach2 = threshold_factor * r * threshold_factor * r;
  std::uint64_t close = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Point x = uniform_point_in_disk({0.0, 0.0}, big, rng);
    const Point y = uniform_point_in_disk({0.0, 0.0}, big, rng);
    if (squared_distance(x, y) <= reach2) ++close;
  }
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(close) / n;
  const double sigma = std::sqrt(p * (1.0 - p) / n);
  return make_check("pair_probability", p, sigma, expected, 0.0, sigma);
}

std::vector<Point> random_fact_configuration(Rng& rng) {
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::vector<Point> centers(static_cast<std::size_t>(count(rng)));
  for (Point& c : centers) {
    c.x = coord(rng);
    c.y = coord(rng);
  }
  return centers;
}

DiskUnion random_lemma_configuration(double r, Rng& rng) {
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_real_distribution<double> coord(0.0, 8.0 * r);
  std::vector<Point> centers(static_cast<std::size_t>(count(rng)));
  for (Point& c : centers) {
    c.x = coord(rng);
    c.y = coord(rng);
  }
  return DiskUnion(std::move(centers), 2.0 * r);
}

std::vector<InequalityCheck> run_fact_suite(std::size_t count, std::uint64_t samples,
                                            std::uint64_t master_seed) {
  constexpr double kGammas[] = {1.1, 1.5, 2.0};
  std::vector<InequalityCheck> checks;
  checks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = make_rng(master_seed, i);
    const auto centers = random_fact_configuration(rng);
    checks.push_back(check_fact_monotonicity(centers, kGammas[i % 3], samples, rng));
  }
  return checks;
}

std::vector<InequalityCheck> run_lemma_suite(std::size_t count, double r,
                                             std::uint64_t pair_samples,
                                             std::uint64_t area_samples,
                                             std::uint64_t master_seed) {
  std::vector<InequalityCheck> checks;
  checks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = make_rng(master_seed, i);
    const DiskUnion u = random_lemma_configuration(r, rng);
    checks.push_back(check_lemma_inequality(u, pair_samples, area_samples, rng));
  }
  return checks;
}

std::vector<PointSet> collect_bad_states(const ModelParams& params, std::size_t count,
                                         std::uint64_t master_seed) {
  std::vector<PointSet> states;
  // Per trajectory keep round 0, the last round, and one from the middle.
  for (std::uint64_t run = 0; states.size() < count; ++run) {
    if (run > 100 * count + 100) {
      throw InvalidState("could not collect enough states with bad pairs");
    }
    std::vector<PointSet> visited;
    prs_sample_seeded(params, split_seed(master_seed, run),
                      [&](std::uint64_t, const PointSet& ps, const BadPairReport&,
                          const ResamplingSet&) { visited.push_back(ps); });
    if (visited.empty()) continue;
    std::vector<std::size_t> picks{0, visited.size() - 1, visited.size() / 2};
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    for (std::size_t idx : picks) {
      if (states.size() == count) break;
      states.push_back(std::move(visited[idx]));
    }
  }
  return states;
}

}  // namespace prs

#include "prs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "prs/common.hpp"

namespace prs {

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b,
                                      double min_expected) {
  if (a.empty() || b.empty()) throw InvalidParameter("both samples must be nonempty");
  const std::uint64_t top = std::max(*std::max_element(a.begin(), a.end()),
                                     *std::max_element(b.begin(), b.end()));
  std::vector<double> ha(top + 1, 0.0);
  std::vector<double> hb(top + 1, 0.0);
  for (auto v : a) ha[v] += 1.0;
  for (auto v : b) hb[v] += 1.0;

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double total = na + nb;
  const double min_share = std::min(na, nb) / total;

  // Greedy left-to-right pooling; a short tail is folded into the last bin.
  std::vector<std::pair<double, double>> bins;
  double ca = 0.0;
  double cb = 0.0;
  for (std::size_t v = 0; v <= top; ++v) {
    ca += ha[v];
    cb += hb[v];
    if ((ca + cb) * min_share >= min_expected) {
      bins.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (bins.empty()) {
      bins.emplace_back(ca, cb);
    } else {
      bins.back().first += ca;
      bins.back().second += cb;
    }
  }

  ChiSquareResult res;
  res.bins = bins.size();
  res.dof = static_cast<int>(bins.size()) - 1;
  if (res.dof < 1) return res;
  for (const auto& [oa, ob] : bins) {
    const double pooled = (oa + ob) / total;
    const double ea = pooled * na;
    const double eb = pooled * nb;
    res.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  const boost::math::chi_squared dist(res.dof);
  res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
  return res;
}

MeanStat mean_stat(std::span<const double> values) {
  MeanStat s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / static_cast<double>(s.n - 1);
  s.std_error = std::sqrt(s.variance / static_cast<double>(s.n));
  return s;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidParameter("line fit needs at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InvalidParameter("line fit needs distinct x values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace prs

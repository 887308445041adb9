#include <doctest.h>

#include <cmath>
#include <random>

#include "prs/common.hpp"
#include "prs/stats.hpp"

using namespace prs;

TEST_CASE("chi_square_two_sample on identical and shifted Poisson samples") {
  Rng rng(3);
  std::poisson_distribution<std::uint64_t> a(4.0);
  std::poisson_distribution<std::uint64_t> b(4.6);
  std::vector<std::uint64_t> x, y, z;
  for (int i = 0; i < 20'000; ++i) {
    x.push_back(a(rng));
    y.push_back(a(rng));
    z.push_back(b(rng));
  }
  const ChiSquareResult same = chi_square_two_sample(x, y);
  CHECK(same.dof >= 8);
  CHECK(same.p_value > 0.001);
  const ChiSquareResult diff = chi_square_two_sample(x, z);
  CHECK(diff.p_value < 1e-10);
}

TEST_CASE("chi_square_two_sample statistic by hand") {
  // Two bins of 10 observations each: {0: 6, 1: 4} versus {0: 4, 1: 6}.
  std::vector<std::uint64_t> a{0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
  std::vector<std::uint64_t> b{0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
  const ChiSquareResult res = chi_square_two_sample(a, b, 1.0);
  // Expected 5 everywhere: 4 * (1^2 / 5) = 0.8, one degree of freedom.
  CHECK(res.dof == 1);
  CHECK(res.statistic == doctest::Approx(0.8));
  CHECK(res.p_value == doctest::Approx(0.3710933695).epsilon(1e-8));

  const ChiSquareResult one_bin = chi_square_two_sample(std::vector<std::uint64_t>{2, 2},
                                                        std::vector<std::uint64_t>{2});
  CHECK(one_bin.dof == 0);
  CHECK(one_bin.p_value == 1.0);
  CHECK_THROWS_AS(chi_square_two_sample({}, b), InvalidParameter);
}

TEST_CASE("mean_stat and fit_line") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const MeanStat s = mean_stat(v);
  CHECK(s.mean == 2.5);
  CHECK(s.variance == doctest::Approx(5.0 / 3.0));
  CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 12.0)));

  const std::vector<double> x{0.0, 1.0, 2.0};
  const std::vector<double> y{1.0, 3.0, 5.0};
  const LineFit f = fit_line(x, y);
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK_THROWS_AS(fit_line(std::vector<double>{1.0, 1.0}, y), InvalidParameter);
}

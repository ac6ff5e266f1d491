#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "latentrank/errors.hpp"
#include "latentrank/ranks.hpp"

using namespace latentrank;

namespace {

std::vector<double> ranks_of(const RankVector& r) { return {r.values().begin(), r.values().end()}; }

// Midranks by counting: rank_i = #{j : v_j < v_i} + (#{j : v_j == v_i} + 1) / 2.
std::vector<double> counting_midranks(const std::vector<double>& v) {
  std::vector<double> out;
  for (double a : v) {
    double less = 0.0, equal = 0.0;
    for (double b : v) {
      less += b < a;
      equal += b == a;
    }
    out.push_back(less + (equal + 1.0) / 2.0);
  }
  return out;
}

}  // namespace

TEST_CASE("movie ratings: aggregated ranks, U and rank-biserial") {
  const std::vector<double> x{4, 3, 1}, y{2, 3, 5};
  CHECK(ranks_of(aggregated_midranks(x, y)) == std::vector<double>{5, 3.5, 1, 2, 3.5, 6});
  const UStatistic u = u_statistic(x, y);
  CHECK(u.u == 3.5);
  CHECK(u.u_complement == 5.5);
  CHECK(rank_biserial(x, y) == doctest::Approx(-2.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("midranks") {
  CHECK(ranks_of(midranks(std::vector<double>{7, 7, 7})) == std::vector<double>{2, 2, 2});
  CHECK(ranks_of(midranks(std::vector<double>{10, 20, 30})) == std::vector<double>{1, 2, 3});
  CHECK(midranks(std::vector<double>{}).empty());
  CHECK_THROWS_AS(midranks(std::vector<double>{1.0, std::nan("")}), InvalidData);
  CHECK_THROWS_AS(midranks(std::vector<double>{std::numeric_limits<double>::infinity()}),
                  InvalidData);

  const std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5};
  const RankVector r = midranks(v);
  CHECK(ranks_of(r) == counting_midranks(v));
  double sum = 0.0;
  for (double x : r.values()) sum += x;
  CHECK(sum == 11.0 * 12.0 / 2.0);
}

TEST_CASE("U statistic edge cases and complement identity") {
  CHECK(u_statistic(std::vector<double>{1, 2}, std::vector<double>{3, 4}).u == 0.0);
  CHECK(u_statistic(std::vector<double>{3, 4}, std::vector<double>{1, 2}).u == 4.0);
  const std::vector<double> x{1, 2, 2, 5}, y{2, 3, 1};
  CHECK(u_statistic(x, y).u + u_statistic(y, x).u == 12.0);
  CHECK_THROWS_AS(u_statistic(std::vector<double>{}, y), InvalidData);
}

TEST_CASE("rank-biserial special cases and antisymmetry") {
  const std::vector<double> a{1, 2, 2, 3}, b{3, 2, 1, 2};
  CHECK(rank_biserial(a, b) == 0.0);
  CHECK(rank_biserial(std::vector<double>{1, 2}, std::vector<double>{3, 4}) == -1.0);
  const std::vector<double> x{0.3, 1.2, 1.2, 4.0}, y{1.2, 2.0, 0.1};
  CHECK(rank_biserial(x, y) == -rank_biserial(y, x));
  CHECK_THROWS_AS(rank_biserial(std::vector<double>{}, y), InvalidData);
}

TEST_CASE("rank-biserial pairwise count equals the U transform for every small sample") {
  // Values from {0, 1, 2} so ties are frequent; all splits with n_x + n_y <= 6.
  int checked = 0;
  for (int total = 2; total <= 6; ++total) {
    for (int nx = 1; nx < total; ++nx) {
      const int ny = total - nx;
      int combos = 1;
      for (int i = 0; i < total; ++i) combos *= 3;
      for (int code = 0; code < combos; ++code) {
        std::vector<double> x, y;
        int c = code;
        for (int i = 0; i < total; ++i, c /= 3) (i < nx ? x : y).push_back(c % 3);
        double pairwise = 0.0;
        for (double xi : x)
          for (double yj : y) pairwise += (xi > yj) - (xi < yj);
        pairwise /= nx * ny;
        const UStatistic u = u_statistic(x, y);
        REQUIRE(rank_biserial(x, y) == doctest::Approx(pairwise).epsilon(1e-14));
        REQUIRE(rank_biserial(x, y) ==
                doctest::Approx(1.0 - 2.0 * u.u_complement / (nx * ny)).epsilon(1e-14));
        ++checked;
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("tutoring data: signed rank decomposition") {
  const SignedRankResult r = signed_rank_w(std::vector<double>{5, 8, 4}, std::vector<double>{6, 7, 7});
  CHECK(r.w == 3.0);
  CHECK(r.decomposition.differences == std::vector<double>{1, -1, 3});
  CHECK(ranks_of(r.decomposition.abs_ranks) == std::vector<double>{1.5, 1.5, 3});
  CHECK(r.decomposition.signs == std::vector<int>{1, -1, 1});
  CHECK(matched_rank_biserial(r.decomposition) == 0.5);
}

TEST_CASE("signed rank W special cases") {
  CHECK(signed_rank_w(std::vector<double>{1, 2, 3}, 0.0).w == 6.0);
  CHECK(signed_rank_w(std::vector<double>{-2, 2}, 0.0).w == 0.0);
  CHECK_THROWS_AS(signed_rank_w(std::vector<double>{1, 2}, std::vector<double>{1}), InvalidData);

  const SignedRankResult z = signed_rank_w(std::vector<double>{0, 1, -2, 0, 3}, 0.0);
  CHECK(z.decomposition.dropped_zeros == 2);
  CHECK(z.decomposition.size() == 3);
  CHECK(z.w == 1.0 - 2.0 + 3.0);
}

TEST_CASE("matched rank-biserial") {
  CHECK(matched_rank_biserial(decompose_differences(std::vector<double>{1, 2, 3})) == 1.0);
  CHECK(matched_rank_biserial(decompose_differences(std::vector<double>{-2, 2})) == 0.0);
  const std::vector<double> d{0.5, -1.5, 2.0, 2.0, -0.1};
  std::vector<double> neg;
  for (double v : d) neg.push_back(-v);
  CHECK(matched_rank_biserial(decompose_differences(neg)) ==
        -matched_rank_biserial(decompose_differences(d)));
  CHECK_THROWS_AS(matched_rank_biserial(decompose_differences(std::vector<double>{0, 0})),
                  UndefinedStatistic);
}

TEST_CASE("spearman rho") {
  CHECK(spearman_rho(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}) == 1.0);
  CHECK(spearman_rho(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == -1.0);
  CHECK(spearman_rho(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 1, 4, 3}) ==
        doctest::Approx(0.6).epsilon(1e-15));
  CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                  UndefinedStatistic);
  CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 2}, std::vector<double>{1}), InvalidData);
}

TEST_CASE("monotone invariance of every statistic") {
  const std::vector<double> x{0.4, 2.2, 1.0, 1.0, 3.5}, y{1.0, 0.1, 2.9, 4.4, 0.4};
  std::vector<double> fx, fy;
  for (double v : x) fx.push_back(std::exp(3.0 * v) - 7.0);
  for (double v : y) fy.push_back(std::exp(3.0 * v) - 7.0);
  CHECK(aggregated_midranks(x, y) == aggregated_midranks(fx, fy));
  CHECK(u_statistic(x, y).u == u_statistic(fx, fy).u);
  CHECK(rank_biserial(x, y) == rank_biserial(fx, fy));
  CHECK(spearman_rho(x, y) == spearman_rho(fx, fy));

  const std::vector<double> d{0.3, -1.2, 2.0, -0.3, 0.9};
  std::vector<double> fd;
  for (double v : d) fd.push_back(v * std::fabs(v));
  const auto a = decompose_differences(d), b = decompose_differences(fd);
  CHECK(a.abs_ranks == b.abs_ranks);
  CHECK(a.signs == b.signs);
  CHECK(matched_rank_biserial(a) == matched_rank_biserial(b));
}

#include "latentrank/ranks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latentrank/errors.hpp"

namespace latentrank {

namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidData("sample contains a non-finite value");
  }
}

void require_nonempty(std::span<const double> values, const char* name) {
  if (values.empty()) throw InvalidData(std::string(name) + " is empty");
}

}  // namespace

RankVector midranks(std::span<const double> values) {
  require_finite(values);
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank ((i+1) + j) / 2.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return RankVector(std::move(ranks));
}

RankVector aggregated_midranks(std::span<const double> x, std::span<const double> y) {
  std::vector<double> all;
  all.reserve(x.size() + y.size());
  all.insert(all.end(), x.begin(), x.end());
  all.insert(all.end(), y.begin(), y.end());
  return midranks(all);
}

UStatistic u_statistic(std::span<const double> x, std::span<const double> y) {
  require_nonempty(x, "x");
  require_nonempty(y, "y");
  const RankVector ranks = aggregated_midranks(x, y);
  const auto nx = static_cast<double>(x.size());
  const auto ny = static_cast<double>(y.size());
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) rank_sum += ranks[i];
  const double u = rank_sum - nx * (nx + 1.0) / 2.0;
  return {u, nx * ny - u};
}

double rank_biserial(std::span<const double> x, std::span<const double> y) {
  require_nonempty(x, "x");
  require_nonempty(y, "y");
  require_finite(x);
  require_finite(y);
  // Count x_i > y_j and x_i < y_j by merging sorted copies: O(n log n).
  std::vector<double> ys(y.begin(), y.end());
  std::sort(ys.begin(), ys.end());
  double balance = 0.0;
  for (double xi : x) {
    const auto below = std::lower_bound(ys.begin(), ys.end(), xi) - ys.begin();
    const auto above = ys.end() - std::upper_bound(ys.begin(), ys.end(), xi);
    balance += static_cast<double>(below) - static_cast<double>(above);
  }
  return balance / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

SignedRankDecomposition decompose_differences(std::span<const double> differences) {
  require_finite(differences);
  SignedRankDecomposition out;
  std::vector<double> magnitudes;
  for (double d : differences) {
    if (d == 0.0) {
      ++out.dropped_zeros;
      continue;
    }
    out.differences.push_back(d);
    out.signs.push_back(d > 0.0 ? 1 : -1);
    magnitudes.push_back(std::fabs(d));
  }
  out.abs_ranks = midranks(magnitudes);
  return out;
}

SignedRankResult signed_rank_w(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidData("paired samples differ in length");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = y[i] - x[i];
  SignedRankResult result{0.0, decompose_differences(d)};
  for (std::size_t i = 0; i < result.decomposition.size(); ++i) {
    result.w += result.decomposition.abs_ranks[i] * result.decomposition.signs[i];
  }
  return result;
}

SignedRankResult signed_rank_w(std::span<const double> x, double test_value) {
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - test_value;
  SignedRankResult result{0.0, decompose_differences(d)};
  for (std::size_t i = 0; i < result.decomposition.size(); ++i) {
    result.w += result.decomposition.abs_ranks[i] * result.decomposition.signs[i];
  }
  return result;
}

double matched_rank_biserial(const SignedRankDecomposition& decomposition) {
  if (decomposition.size() == 0) {
    throw UndefinedStatistic("matched rank-biserial undefined: all differences are zero");
  }
  double positive = 0.0;
  double negative = 0.0;
  for (std::size_t i = 0; i < decomposition.size(); ++i) {
    (decomposition.signs[i] > 0 ? positive : negative) += decomposition.abs_ranks[i];
  }
  return (positive - negative) / (positive + negative);
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidData("paired samples differ in length");
  if (x.size() < 2) throw InvalidData("spearman_rho needs at least two pairs");
  const RankVector rx = midranks(x);
  const RankVector ry = midranks(y);
  const double n = static_cast<double>(x.size());
  // Both rank vectors have mean (n+1)/2.
  const double centre = (n + 1.0) / 2.0;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = rx[i] - centre;
    const double b = ry[i] - centre;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedStatistic("spearman_rho undefined: a margin is constant");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace latentrank

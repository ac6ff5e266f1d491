#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace latentrank {

/// Raw measurements or Likert codes.
using Sample = std::vector<double>;

/// Midranks (average ranks) of a sample. Ranks are 1-based; tied values share
/// the mean of the positions they occupy, so the ranks always sum to
/// n(n+1)/2.
class RankVector {
 public:
  RankVector() = default;
  explicit RankVector(std::vector<double> ranks) : ranks_(std::move(ranks)) {}

  std::size_t size() const { return ranks_.size(); }
  bool empty() const { return ranks_.empty(); }
  double operator[](std::size_t i) const { return ranks_[i]; }
  std::span<const double> values() const { return ranks_; }

  friend bool operator==(const RankVector&, const RankVector&) = default;

 private:
  std::vector<double> ranks_;
};

/// Throws InvalidData on NaN or infinite input.
RankVector midranks(std::span<const double> values);

/// Concatenates x and y and ranks them jointly.
RankVector aggregated_midranks(std::span<const double> x, std::span<const double> y);

struct UStatistic {
  double u;             ///< sum of x's aggregated ranks minus n_x(n_x+1)/2
  double u_complement;  ///< n_x * n_y - u, the same count taken over y
};

UStatistic u_statistic(std::span<const double> x, std::span<const double> y);

/// Pairwise sign count: (#{x_i > y_j} - #{x_i < y_j}) / (n_x n_y); ties
/// count zero. Equal to 1 - 2 U' / (n_x n_y) with U' = u_complement.
double rank_biserial(std::span<const double> x, std::span<const double> y);

/// Difference scores with exact zeros removed, midranks of their absolute
/// values, and their signs.
struct SignedRankDecomposition {
  std::vector<double> differences;
  RankVector abs_ranks;
  std::vector<int> signs;
  std::size_t dropped_zeros = 0;

  std::size_t size() const { return differences.size(); }
};

SignedRankDecomposition decompose_differences(std::span<const double> differences);

struct SignedRankResult {
  double w;
  SignedRankDecomposition decomposition;
};

/// Paired form: d_i = y_i - x_i.
SignedRankResult signed_rank_w(std::span<const double> x, std::span<const double> y);
/// One-sample form: d_i = x_i - test_value.
SignedRankResult signed_rank_w(std::span<const double> x, double test_value);

/// (T+ - T-) / (T+ + T-) over the nonzero differences. Throws
/// UndefinedStatistic when every difference is zero.
double matched_rank_biserial(const SignedRankDecomposition& decomposition);

/// Product-moment correlation of the two midrank vectors.
double spearman_rho(std::span<const double> x, std::span<const double> y);

}  // namespace latentrank

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "latentrank/distributions.hpp"
#include "latentrank/ranks.hpp"
#include "latentrank/rng.hpp"

namespace latentrank {

namespace detail {

/// Groups observations by rank level and caches, per level, the smallest and
/// largest key. Because latent keys are ordinally concordant with the levels,
/// the bound set {keys at lower levels} has its maximum in the adjacent level,
/// so bounds are O(1) amortised instead of O(n).
class LevelIndex {
 public:
  LevelIndex() = default;
  explicit LevelIndex(const RankVector& ranks);

  std::size_t level_of(std::size_t i) const { return level_of_[i]; }
  std::size_t level_count() const { return members_.size(); }

  /// (max key of the level below, min key of the level above), +-inf when
  /// there is no such level.
  std::pair<double, double> neighbours(std::size_t i, std::span<const double> keys) const;

  void update(std::size_t i, double old_key, double new_key);
  void invalidate();

 private:
  double level_max(std::size_t level, std::span<const double> keys) const;
  double level_min(std::size_t level, std::span<const double> keys) const;

  std::vector<std::size_t> level_of_;
  std::vector<std::vector<std::size_t>> members_;
  mutable std::vector<double> max_;
  mutable std::vector<double> min_;
  mutable std::vector<char> max_valid_;
  mutable std::vector<char> min_valid_;
};

}  // namespace detail

/// Latent normal scores tied to a fixed observed ranking.
///
/// Invariant: rank_i < rank_j implies z_i < z_j. Tied ranks do not constrain
/// each other. Mutators keep the invariant; `assign` expects a value inside
/// `bounds(i)`.
class LatentVector {
 public:
  LatentVector() = default;
  /// Starts at z_i = normal_quantile(rank_i / (n + 1)).
  explicit LatentVector(RankVector ranks);
  /// Throws InvalidData if `values` is not concordant with `ranks`.
  LatentVector(RankVector ranks, std::vector<double> values);

  std::size_t size() const { return z_.size(); }
  std::span<const double> values() const { return z_; }
  double operator[](std::size_t i) const { return z_[i]; }
  const RankVector& observed_ranks() const { return ranks_; }

  /// Truncation interval for z_i given all other values (cached lookup).
  TruncationInterval bounds(std::size_t i) const;

  void assign(std::size_t i, double value);
  void shift(double offset);
  void scale(double factor);

  /// O(n log n) check of the ordinal invariant.
  bool concordant() const;

 private:
  RankVector ranks_;
  std::vector<double> z_;
  detail::LevelIndex index_;
};

/// Latent difference scores for the signed rank model: |z| is concordant with
/// the ranks of |d| and sign(z_i) = sign(d_i). Zero acts as a fixed threshold
/// separating the two signs.
class SignedLatentVector {
 public:
  SignedLatentVector() = default;
  explicit SignedLatentVector(const SignedRankDecomposition& decomposition);
  SignedLatentVector(const SignedRankDecomposition& decomposition, std::vector<double> values);

  std::size_t size() const { return z_.size(); }
  std::span<const double> values() const { return z_; }
  double operator[](std::size_t i) const { return z_[i]; }
  std::span<const int> signs() const { return signs_; }
  const RankVector& abs_ranks() const { return abs_ranks_; }

  TruncationInterval bounds(std::size_t i) const;
  void assign(std::size_t i, double value);
  void scale(double factor);
  bool concordant() const;

 private:
  RankVector abs_ranks_;
  std::vector<int> signs_;
  std::vector<double> z_;
  std::vector<double> magnitude_;
  detail::LevelIndex index_;
};

/// Reference implementation of the lower/upper thresholds: a linear scan over
/// every other observation. lower = max{z_j : rank_j < rank_i},
/// upper = min{z_j : rank_j > rank_i}.
TruncationInterval thresholds(std::size_t i, const LatentVector& latent);
TruncationInterval thresholds(std::size_t i, const SignedLatentVector& latent);

/// Systematic-scan Gibbs update in ascending index order; each z_i is drawn
/// from Normal(means[i], sd^2) truncated to its current bounds.
void gibbs_sweep(LatentVector& latent, std::span<const double> means, double sd,
                 RngStream& stream);
void gibbs_sweep(SignedLatentVector& latent, double mean, double sd, RngStream& stream);

/// Location move for the two-sample model. The first `n_x` entries of the
/// joint latent vector belong to x (mean -delta/2), the rest to y
/// (mean +delta/2). Draws c ~ Normal(-w, 1/n) with
/// w = mean(z_x + delta/2, z_y - delta/2), adds it to every value and returns c.
double decorrelate_shift(LatentVector& latent, std::size_t n_x, double delta, RngStream& stream);

/// Log acceptance ratio of the scale move z -> factor * z under independent
/// Normal(location_i, sd^2) components, including the Jacobian factor^n.
double scale_move_log_ratio(std::span<const double> values, std::span<const double> location,
                            double sd, double factor);

/// Metropolis-Hastings group move z -> s z with log s ~ Normal(0, step_sd^2).
/// Returns true when accepted.
bool decorrelate_scale(LatentVector& latent, std::span<const double> location, double sd,
                       double step_sd, RngStream& stream);
bool decorrelate_scale(SignedLatentVector& latent, double location, double step_sd,
                       RngStream& stream);

}  // namespace latentrank

#include "latentrank/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "latentrank/errors.hpp"

namespace latentrank {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> initial_scores(const RankVector& ranks) {
  const double n = static_cast<double>(ranks.size());
  std::vector<double> z(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) z[i] = normal_quantile(ranks[i] / (n + 1.0));
  return z;
}

// Strict concordance of keys with ranks, ties unconstrained.
bool keys_concordant(std::span<const double> ranks, std::span<const double> keys) {
  std::vector<std::size_t> order(ranks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });
  double previous_max = -kInf;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double level_min = kInf;
    double level_max = -kInf;
    while (j < order.size() && ranks[order[j]] == ranks[order[i]]) {
      const double v = keys[order[j]];
      if (!std::isfinite(v)) return false;
      level_min = std::min(level_min, v);
      level_max = std::max(level_max, v);
      ++j;
    }
    if (!(level_min > previous_max)) return false;
    previous_max = level_max;
    i = j;
  }
  return true;
}

}  // namespace

namespace detail {

LevelIndex::LevelIndex(const RankVector& ranks) {
  const std::size_t n = ranks.size();
  std::vector<double> distinct(ranks.values().begin(), ranks.values().end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  level_of_.resize(n);
  members_.assign(distinct.size(), {});
  for (std::size_t i = 0; i < n; ++i) {
    const auto level = static_cast<std::size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), ranks[i]) - distinct.begin());
    level_of_[i] = level;
    members_[level].push_back(i);
  }
  max_.assign(distinct.size(), 0.0);
  min_.assign(distinct.size(), 0.0);
  max_valid_.assign(distinct.size(), 0);
  min_valid_.assign(distinct.size(), 0);
}

double LevelIndex::level_max(std::size_t level, std::span<const double> keys) const {
  if (!max_valid_[level]) {
    double m = -kInf;
    for (std::size_t j : members_[level]) m = std::max(m, keys[j]);
    max_[level] = m;
    max_valid_[level] = 1;
  }
  return max_[level];
}

double LevelIndex::level_min(std::size_t level, std::span<const double> keys) const {
  if (!min_valid_[level]) {
    double m = kInf;
    for (std::size_t j : members_[level]) m = std::min(m, keys[j]);
    min_[level] = m;
    min_valid_[level] = 1;
  }
  return min_[level];
}

std::pair<double, double> LevelIndex::neighbours(std::size_t i,
                                                 std::span<const double> keys) const {
  const std::size_t level = level_of_[i];
  const double lower = level == 0 ? -kInf : level_max(level - 1, keys);
  const double upper = level + 1 == members_.size() ? kInf : level_min(level + 1, keys);
  return {lower, upper};
}

void LevelIndex::update(std::size_t i, double old_key, double new_key) {
  const std::size_t level = level_of_[i];
  if (max_valid_[level]) {
    if (new_key >= max_[level]) {
      max_[level] = new_key;
    } else if (old_key == max_[level]) {
      max_valid_[level] = 0;
    }
  }
  if (min_valid_[level]) {
    if (new_key <= min_[level]) {
      min_[level] = new_key;
    } else if (old_key == min_[level]) {
      min_valid_[level] = 0;
    }
  }
}

void LevelIndex::invalidate() {
  std::fill(max_valid_.begin(), max_valid_.end(), 0);
  std::fill(min_valid_.begin(), min_valid_.end(), 0);
}

}  // namespace detail

// LatentVector --------------------------------------------------------------

LatentVector::LatentVector(RankVector ranks)
    : ranks_(std::move(ranks)), z_(initial_scores(ranks_)), index_(ranks_) {}

LatentVector::LatentVector(RankVector ranks, std::vector<double> values)
    : ranks_(std::move(ranks)), z_(std::move(values)), index_(ranks_) {
  if (z_.size() != ranks_.size()) throw InvalidData("latent values and ranks differ in length");
  if (!concordant()) throw InvalidData("latent values are not concordant with the ranks");
}

TruncationInterval LatentVector::bounds(std::size_t i) const {
  const auto [lower, upper] = index_.neighbours(i, z_);
  return {lower, upper};
}

void LatentVector::assign(std::size_t i, double value) {
  index_.update(i, z_[i], value);
  z_[i] = value;
}

void LatentVector::shift(double offset) {
  for (double& v : z_) v += offset;
  index_.invalidate();
}

void LatentVector::scale(double factor) {
  for (double& v : z_) v *= factor;
  index_.invalidate();
}

bool LatentVector::concordant() const { return keys_concordant(ranks_.values(), z_); }

// SignedLatentVector --------------------------------------------------------

SignedLatentVector::SignedLatentVector(const SignedRankDecomposition& decomposition)
    : abs_ranks_(decomposition.abs_ranks),
      signs_(decomposition.signs),
      z_(decomposition.size()),
      magnitude_(decomposition.size()),
      index_(abs_ranks_) {
  const double n = static_cast<double>(z_.size());
  for (std::size_t i = 0; i < z_.size(); ++i) {
    magnitude_[i] = normal_quantile(0.5 + 0.5 * abs_ranks_[i] / (n + 1.0));
    z_[i] = signs_[i] * magnitude_[i];
  }
}

SignedLatentVector::SignedLatentVector(const SignedRankDecomposition& decomposition,
                                       std::vector<double> values)
    : abs_ranks_(decomposition.abs_ranks),
      signs_(decomposition.signs),
      z_(std::move(values)),
      magnitude_(z_.size()),
      index_(abs_ranks_) {
  if (z_.size() != signs_.size()) throw InvalidData("latent values and ranks differ in length");
  for (std::size_t i = 0; i < z_.size(); ++i) magnitude_[i] = std::fabs(z_[i]);
  if (!concordant()) throw InvalidData("latent values are not concordant with signed ranks");
}

TruncationInterval SignedLatentVector::bounds(std::size_t i) const {
  auto [lower, upper] = index_.neighbours(i, magnitude_);
  lower = std::max(lower, 0.0);
  if (signs_[i] > 0) return {lower, upper};
  return {-upper, -lower};
}

void SignedLatentVector::assign(std::size_t i, double value) {
  const double magnitude = std::fabs(value);
  index_.update(i, magnitude_[i], magnitude);
  magnitude_[i] = magnitude;
  z_[i] = value;
}

void SignedLatentVector::scale(double factor) {
  for (std::size_t i = 0; i < z_.size(); ++i) {
    z_[i] *= factor;
    magnitude_[i] = std::fabs(z_[i]);
  }
  index_.invalidate();
}

bool SignedLatentVector::concordant() const {
  for (std::size_t i = 0; i < z_.size(); ++i) {
    if (!(signs_[i] > 0 ? z_[i] > 0.0 : z_[i] < 0.0)) return false;
  }
  return keys_concordant(abs_ranks_.values(), magnitude_);
}

// Reference thresholds ------------------------------------------------------

TruncationInterval thresholds(std::size_t i, const LatentVector& latent) {
  const auto& ranks = latent.observed_ranks();
  double lower = -kInf;
  double upper = kInf;
  for (std::size_t j = 0; j < latent.size(); ++j) {
    if (ranks[j] < ranks[i]) lower = std::max(lower, latent[j]);
    if (ranks[j] > ranks[i]) upper = std::min(upper, latent[j]);
  }
  return {lower, upper};
}

TruncationInterval thresholds(std::size_t i, const SignedLatentVector& latent) {
  const auto& ranks = latent.abs_ranks();
  double lower = 0.0;
  double upper = kInf;
  for (std::size_t j = 0; j < latent.size(); ++j) {
    const double magnitude = std::fabs(latent[j]);
    if (ranks[j] < ranks[i]) lower = std::max(lower, magnitude);
    if (ranks[j] > ranks[i]) upper = std::min(upper, magnitude);
  }
  if (latent.signs()[i] > 0) return {lower, upper};
  return {-upper, -lower};
}

// Moves ---------------------------------------------------------------------

void gibbs_sweep(LatentVector& latent, std::span<const double> means, double sd,
                 RngStream& stream) {
  if (means.size() != latent.size()) throw InvalidData("means and latent differ in length");
  for (std::size_t i = 0; i < latent.size(); ++i) {
    latent.assign(i, truncated_normal_sample(stream, means[i], sd, latent.bounds(i)));
  }
}

void gibbs_sweep(SignedLatentVector& latent, double mean, double sd, RngStream& stream) {
  for (std::size_t i = 0; i < latent.size(); ++i) {
    latent.assign(i, truncated_normal_sample(stream, mean, sd, latent.bounds(i)));
  }
}

double decorrelate_shift(LatentVector& latent, std::size_t n_x, double delta,
                         RngStream& stream) {
  const std::size_t n = latent.size();
  if (n == 0) return 0.0;
  if (n_x > n) throw InvalidData("group split exceeds latent length");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += latent[i] + (i < n_x ? 0.5 * delta : -0.5 * delta);
  }
  const double centre = sum / static_cast<double>(n);
  const double offset = normal_sample(stream, -centre, 1.0 / std::sqrt(static_cast<double>(n)));
  latent.shift(offset);
  return offset;
}

double scale_move_log_ratio(std::span<const double> values, std::span<const double> location,
                            double sd, double factor) {
  double log_ratio = static_cast<double>(values.size()) * std::log(factor);
  const double inv_var = 1.0 / (sd * sd);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double before = values[i] - location[i];
    const double after = factor * values[i] - location[i];
    log_ratio -= 0.5 * inv_var * (after * after - before * before);
  }
  return log_ratio;
}

bool decorrelate_scale(LatentVector& latent, std::span<const double> location, double sd,
                       double step_sd, RngStream& stream) {
  if (latent.size() == 0) return true;
  const double factor = std::exp(normal_sample(stream, 0.0, step_sd));
  const double log_ratio = scale_move_log_ratio(latent.values(), location, sd, factor);
  if (std::log(stream.uniform_open()) < log_ratio) {
    latent.scale(factor);
    return true;
  }
  return false;
}

bool decorrelate_scale(SignedLatentVector& latent, double location, double step_sd,
                       RngStream& stream) {
  if (latent.size() == 0) return true;
  const double factor = std::exp(normal_sample(stream, 0.0, step_sd));
  const std::vector<double> centre(latent.size(), location);
  const double log_ratio = scale_move_log_ratio(latent.values(), centre, 1.0, factor);
  if (std::log(stream.uniform_open()) < log_ratio) {
    latent.scale(factor);
    return true;
  }
  return false;
}

}  // namespace latentrank

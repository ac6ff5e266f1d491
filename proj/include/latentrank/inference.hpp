#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "latentrank/samplers.hpp"

namespace latentrank {

struct BayesFactorResult {
  enum class Method { rao_blackwell, kde };

  double bf10;
  double bf01;
  /// Computed from log ordinates; finite even when bf10 overflows.
  double log_bf10;
  double prior_ordinate;
  double posterior_ordinate;
  Method method;
};

std::string_view to_string(BayesFactorResult::Method method);

struct PosteriorSummary {
  double median;
  double ci_lower;  ///< 2.5% quantile
  double ci_upper;  ///< 97.5% quantile
  double ess;
  std::optional<double> rhat;  ///< empty for a single chain
  std::size_t draws;
};

/// Average of Normal(at; mean, sd) over every retained conditional.
double rao_blackwell_density(std::span<const ChainOutput> chains, double at);
/// Log of rao_blackwell_density, evaluated without underflow.
double log_rao_blackwell_density(std::span<const ChainOutput> chains, double at);

/// Savage-Dickey ratio at delta = 0. BF01 = posterior ordinate / prior
/// ordinate with the posterior ordinate Rao-Blackwellised. Throws
/// InsufficientSamples when no conditionals were retained.
BayesFactorResult savage_dickey_delta(std::span<const ChainOutput> chains, const PriorSpec& prior);

/// Savage-Dickey ratio at rho = 0 against the Uniform[-1, 1] prior, with the
/// posterior ordinate from a reflected KDE of the pooled samples. Throws
/// InsufficientSamples below 1000 pooled draws.
BayesFactorResult savage_dickey_rho(std::span<const ChainOutput> chains);

/// 0.9 min(sd, IQR / 1.34) n^(-1/5). Falls back to the sd when the IQR is
/// zero; throws UndefinedStatistic when the sample has no spread.
double silverman_bandwidth(std::span<const double> samples);

/// Gaussian KDE on [lower, upper], reflected at both ends so no mass leaks
/// past the boundary.
class ReflectedKde {
 public:
  ReflectedKde(std::vector<double> samples, double lower, double upper,
               std::optional<double> bandwidth = std::nullopt);

  double operator()(double x) const;
  /// Log density without underflow far from the samples.
  double log_density(double x) const;
  double bandwidth() const { return bandwidth_; }

 private:
  std::vector<double> samples_;
  double lower_;
  double upper_;
  double bandwidth_;
};

/// rho_s = (6 / pi) asin(rho / 2). Throws DomainError outside [-1, 1].
double kruskal_rho_to_rhos(double rho);
/// rho = 2 sin(pi rho_s / 6). Throws DomainError outside [-1, 1].
double kruskal_rhos_to_rho(double rho_s);

/// Linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile_type7(std::span<const double> samples, double p);

/// Multi-chain effective sample size using Geyer's initial monotone sequence
/// on the combined autocorrelation estimate. Never exceeds the draw count.
double effective_sample_size(std::span<const std::vector<double>> chains);

/// Split R-hat. Needs at least two chains of at least four draws each.
double split_rhat(std::span<const std::vector<double>> chains);

/// Median, 95% equal-tailed interval, ESS and split R-hat. Throws
/// InsufficientSamples for fewer than 100 pooled draws.
PosteriorSummary posterior_summary(std::span<const std::vector<double>> chains);

/// prior_odds * bf10. Throws DomainError unless both are positive.
double posterior_odds(double bf10, double prior_odds);

/// Log BF10 of the default (Cauchy prior on effect size) t-test given the t
/// statistic, effective sample size and degrees of freedom.
double jzs_log_bf10(double t, double n_effective, double df, double cauchy_scale);

/// Two-sample pooled-variance form; needs two observations per group.
double jzs_ttest_log_bf10(std::span<const double> x, std::span<const double> y,
                          double cauchy_scale);

/// One-sample form on difference scores; needs two observations.
double jzs_ttest_log_bf10(std::span<const double> differences, double cauchy_scale);

}  // namespace latentrank

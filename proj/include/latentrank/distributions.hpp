#pragma once

#include "latentrank/rng.hpp"

namespace latentrank {

/// Open interval (lower, upper) on the extended real line. Infinite bounds are
/// represented by +-infinity.
struct TruncationInterval {
  double lower;
  double upper;

  /// Throws InvalidInterval unless lower < upper.
  TruncationInterval(double lower, double upper);

  static TruncationInterval unbounded();
  bool contains(double x) const { return lower < x && x < upper; }
};

// Densities. All pure; all throw InvalidParameter on non-positive or
// non-finite scale.

double normal_pdf(double x, double mean = 0.0, double sd = 1.0);
double normal_logpdf(double x, double mean = 0.0, double sd = 1.0);
double normal_cdf(double x, double mean = 0.0, double sd = 1.0);
/// Upper tail 1 - cdf, computed without cancellation.
double normal_ccdf(double x, double mean = 0.0, double sd = 1.0);
/// Wichura's AS241 (PPND16). Throws DomainError unless 0 < p < 1.
double normal_quantile(double p, double mean = 0.0, double sd = 1.0);
double cauchy_pdf(double x, double location, double scale);

// Samplers. Each advances `stream`.

double normal_sample(RngStream& stream, double mean, double sd);

/// Normal(mean, sd^2) restricted to the open interval. Mode-covering
/// intervals use normal or uniform rejection; tail intervals use an
/// exponential proposal (Robert 1995) or uniform rejection when short.
double truncated_normal_sample(RngStream& stream, double mean, double sd,
                               const TruncationInterval& interval);

double exponential_sample(RngStream& stream, double rate = 1.0);

/// Gamma(shape, rate) by Marsaglia-Tsang; shape < 1 via the U^(1/shape) boost.
double gamma_sample(RngStream& stream, double shape, double rate = 1.0);

/// Density proportional to x^(-shape-1) exp(-scale/x); sampled as
/// 1 / Gamma(shape, rate = scale).
double inverse_gamma_sample(RngStream& stream, double shape, double scale);

}  // namespace latentrank

#include "latentrank/distributions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "latentrank/errors.hpp"

namespace latentrank {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_scale(double sd, const char* what) {
  if (!std::isfinite(sd) || !(sd > 0.0)) {
    throw InvalidParameter(std::string(what) + " must be finite and > 0");
  }
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidParameter(std::string(what) + " must be finite");
}

double poly(const std::array<double, 8>& c, double x) {
  double acc = c[7];
  for (int i = 6; i >= 0; --i) acc = acc * x + c[static_cast<std::size_t>(i)];
  return acc;
}

// AS241 PPND16 for the standard normal.
double standard_normal_quantile(double p) {
  static constexpr std::array<double, 8> a{
      3.387132872796366608,  133.14166789178437745, 1971.5909503065514427,
      13731.693765509461125, 45921.953931549871457, 67265.770927008700853,
      33430.575583588128105, 2509.0809287301226727};
  static constexpr std::array<double, 8> b{
      1.0,                   42.313330701600911252, 687.1870074920579083,
      5394.1960214247511077, 21213.794301586595867, 39307.89580009271061,
      28729.085735721942674, 5226.495278852545925};
  static constexpr std::array<double, 8> c{
      1.42343711074968357734,     4.6303378461565452959,     5.7694972214606914055,
      3.64784832476320460504,     1.27045825245236838258,    0.24178072517745061177,
      0.0227238449892691845833,   7.7454501427834140764e-4};
  static constexpr std::array<double, 8> d{
      1.0,                        2.05319162663775882187,    1.6763848301838038494,
      0.68976733498510000455,     0.14810397642748007459,    0.0151986665636164571966,
      5.475938084995344946e-4,    1.05075007164441684324e-9};
  static constexpr std::array<double, 8> e{
      6.6579046435011037772,      5.4637849111641143699,     1.7848265399172913358,
      0.29656057182850489123,     0.026532189526576123093,   0.0012426609473880784386,
      2.71155556874348757815e-5,  2.01033439929228813265e-7};
  static constexpr std::array<double, 8> f{
      1.0,                        0.59983220655588793769,    0.13692988092273580531,
      0.0148753612908506148525,   7.868691311456132591e-4,   1.8463183175100546818e-5,
      1.4215117583164458887e-7,   2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(a, r) / poly(b, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = poly(c, r) / poly(d, r);
  } else {
    r -= 5.0;
    value = poly(e, r) / poly(f, r);
  }
  return q < 0.0 ? -value : value;
}

// Standard-normal sampling by inversion: one uniform per draw.
double standard_normal(RngStream& stream) {
  return standard_normal_quantile(stream.uniform_open());
}

// Uniform proposal on (a, b); `log_bound` is the log of the envelope, i.e.
// -min(x^2)/2 over the interval.
double uniform_rejection(RngStream& stream, double a, double b, double log_bound) {
  for (;;) {
    const double x = a + (b - a) * stream.uniform_open();
    if (!(a < x && x < b)) continue;
    const double log_accept = -0.5 * x * x - log_bound;
    if (std::log(stream.uniform_open()) < log_accept) return x;
  }
}

// Robert's translated-exponential proposal for (a, b) with a >= 0.
double exponential_tail(RngStream& stream, double a, double b) {
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a - std::log(stream.uniform_open()) / rate;
    if (!(x > a && x < b)) continue;
    const double diff = x - rate;
    if (std::log(stream.uniform_open()) < -0.5 * diff * diff) return x;
  }
}

// Standard normal truncated to (a, b) with 0 <= a < b.
double right_of_mode(RngStream& stream, double a, double b) {
  if (std::isfinite(b) && b * b - a * a <= 2.0) {
    return uniform_rejection(stream, a, b, -0.5 * a * a);
  }
  if (a < 0.3) {
    // Half-normal rejection is efficient near the mode.
    for (;;) {
      const double x = std::fabs(standard_normal(stream));
      if (a < x && x < b) return x;
    }
  }
  return exponential_tail(stream, a, b);
}

double standard_truncated(RngStream& stream, double a, double b) {
  if (a >= 0.0) return right_of_mode(stream, a, b);
  if (b <= 0.0) return -right_of_mode(stream, -b, -a);
  // Interval covers the mode.
  if (b - a < std::sqrt(2.0 * std::numbers::pi)) {
    return uniform_rejection(stream, a, b, 0.0);
  }
  for (;;) {
    const double x = standard_normal(stream);
    if (a < x && x < b) return x;
  }
}

}  // namespace

TruncationInterval::TruncationInterval(double lo, double hi) : lower(lo), upper(hi) {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
    throw InvalidInterval("truncation interval requires lower < upper");
  }
}

TruncationInterval TruncationInterval::unbounded() { return {-kInf, kInf}; }

double normal_pdf(double x, double mean, double sd) {
  require_scale(sd, "sd");
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double normal_logpdf(double x, double mean, double sd) {
  require_scale(sd, "sd");
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double normal_cdf(double x, double mean, double sd) {
  require_scale(sd, "sd");
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

double normal_ccdf(double x, double mean, double sd) {
  require_scale(sd, "sd");
  return 0.5 * std::erfc((x - mean) / (sd * std::numbers::sqrt2));
}

double normal_quantile(double p, double mean, double sd) {
  require_scale(sd, "sd");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile requires 0 < p < 1");
  return mean + sd * standard_normal_quantile(p);
}

double cauchy_pdf(double x, double location, double scale) {
  require_scale(scale, "scale");
  const double z = (x - location) / scale;
  return 1.0 / (std::numbers::pi * scale * (1.0 + z * z));
}

double normal_sample(RngStream& stream, double mean, double sd) {
  require_finite(mean, "mean");
  require_scale(sd, "sd");
  return mean + sd * standard_normal(stream);
}

double truncated_normal_sample(RngStream& stream, double mean, double sd,
                               const TruncationInterval& interval) {
  require_finite(mean, "mean");
  require_scale(sd, "sd");
  // Re-validate: the struct is an aggregate-like value and may have been
  // mutated after construction.
  if (std::isnan(interval.lower) || std::isnan(interval.upper) ||
      !(interval.lower < interval.upper)) {
    throw InvalidInterval("truncation interval requires lower < upper");
  }
  const double a = (interval.lower - mean) / sd;
  const double b = (interval.upper - mean) / sd;
  // Rounding in the affine map can land exactly on a bound for very narrow
  // intervals; resample a bounded number of times, then fall back to the
  // midpoint.
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double x = mean + sd * standard_truncated(stream, a, b);
    if (interval.contains(x)) return x;
  }
  return interval.lower + 0.5 * (interval.upper - interval.lower);
}

double exponential_sample(RngStream& stream, double rate) {
  require_scale(rate, "rate");
  return -std::log(stream.uniform_open()) / rate;
}

double gamma_sample(RngStream& stream, double shape, double rate) {
  require_scale(shape, "shape");
  require_scale(rate, "rate");
  if (shape < 1.0) {
    const double boosted = gamma_sample(stream, shape + 1.0, 1.0);
    return boosted * std::pow(stream.uniform_open(), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(stream);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double inverse_gamma_sample(RngStream& stream, double shape, double scale) {
  require_scale(shape, "shape");
  require_scale(scale, "scale");
  return 1.0 / gamma_sample(stream, shape, scale);
}

}  // namespace latentrank

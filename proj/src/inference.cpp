#include "latentrank/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "latentrank/distributions.hpp"
#include "latentrank/errors.hpp"

namespace latentrank {

namespace {

constexpr double kPriorRhoOrdinate = 0.5;
constexpr std::size_t kMinKdeSamples = 1000;
constexpr std::size_t kMinSummarySamples = 100;

// Works on log ordinates so a posterior far from the null value gives a
// finite log BF10 even when its ordinate underflows.
BayesFactorResult make_bf(double log_prior, double log_posterior,
                          BayesFactorResult::Method method) {
  const double log_bf10 = log_prior - log_posterior;
  return {std::exp(log_bf10), std::exp(-log_bf10), log_bf10, std::exp(log_prior),
          std::exp(log_posterior), method};
}

// Accumulates log(sum exp(a_i)) in one pass.
class LogSumExp {
 public:
  void add(double a) {
    if (a <= max_) {
      sum_ += std::exp(a - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - a) + 1.0;
      max_ = a;
    }
  }
  double value() const { return max_ + std::log(sum_); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

// Autocovariance at `lag` with denominator n.
double autocovariance(std::span<const double> v, double mean, std::size_t lag) {
  double s = 0.0;
  for (std::size_t i = 0; i + lag < v.size(); ++i) s += (v[i] - mean) * (v[i + lag] - mean);
  return s / static_cast<double>(v.size());
}

void check_equal_lengths(std::span<const std::vector<double>> chains) {
  if (chains.empty() || chains.front().empty()) throw InsufficientSamples("no chains or draws");
  for (const auto& c : chains) {
    if (c.size() != chains.front().size()) throw InvalidData("chains differ in length");
  }
}

}  // namespace

std::string_view to_string(BayesFactorResult::Method method) {
  return method == BayesFactorResult::Method::kde ? "kde" : "rao-blackwell";
}

double log_rao_blackwell_density(std::span<const ChainOutput> chains, double at) {
  LogSumExp total;
  std::size_t count = 0;
  for (const ChainOutput& chain : chains) {
    for (const NormalParams& c : chain.conditionals) {
      total.add(normal_logpdf(at, c.mean, c.sd));
      ++count;
    }
  }
  if (count == 0) throw InsufficientSamples("no retained conditionals");
  return total.value() - std::log(static_cast<double>(count));
}

double rao_blackwell_density(std::span<const ChainOutput> chains, double at) {
  return std::exp(log_rao_blackwell_density(chains, at));
}

BayesFactorResult savage_dickey_delta(std::span<const ChainOutput> chains,
                                      const PriorSpec& prior) {
  if (prior.kind != PriorSpec::Kind::cauchy_on_delta) {
    throw InvalidParameter("delta Bayes factor needs a Cauchy prior");
  }
  prior.validate();
  return make_bf(std::log(cauchy_pdf(0.0, 0.0, prior.cauchy_scale)),
                 log_rao_blackwell_density(chains, 0.0), BayesFactorResult::Method::rao_blackwell);
}

BayesFactorResult savage_dickey_rho(std::span<const ChainOutput> chains) {
  std::vector<double> pooled;
  for (const ChainOutput& chain : chains) {
    pooled.insert(pooled.end(), chain.samples.begin(), chain.samples.end());
  }
  if (pooled.size() < kMinKdeSamples) {
    throw InsufficientSamples("rho Bayes factor needs at least 1000 pooled draws");
  }
  const ReflectedKde kde(std::move(pooled), -1.0, 1.0);
  return make_bf(std::log(kPriorRhoOrdinate), kde.log_density(0.0),
                 BayesFactorResult::Method::kde);
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw InsufficientSamples("bandwidth needs two samples");
  const double sd = std::sqrt(variance_of(samples));
  const double iqr = quantile_type7(samples, 0.75) - quantile_type7(samples, 0.25);
  double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  if (!(spread > 0.0)) throw UndefinedStatistic("bandwidth undefined for constant samples");
  return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

ReflectedKde::ReflectedKde(std::vector<double> samples, double lower, double upper,
                           std::optional<double> bandwidth)
    : samples_(std::move(samples)), lower_(lower), upper_(upper) {
  if (!(lower_ < upper_)) throw InvalidInterval("KDE support must satisfy lower < upper");
  if (samples_.empty()) throw InsufficientSamples("KDE needs samples");
  bandwidth_ = bandwidth ? *bandwidth : silverman_bandwidth(samples_);
  if (!(bandwidth_ > 0.0)) throw InvalidParameter("bandwidth must be > 0");
}

double ReflectedKde::operator()(double x) const { return std::exp(log_density(x)); }

double ReflectedKde::log_density(double x) const {
  if (x < lower_ || x > upper_) return -std::numeric_limits<double>::infinity();
  const double inv_h = 1.0 / bandwidth_;
  LogSumExp total;
  for (double s : samples_) {
    for (double centre : {s, 2.0 * lower_ - s, 2.0 * upper_ - s}) {
      total.add(normal_logpdf((x - centre) * inv_h));
    }
  }
  return total.value() + std::log(inv_h / static_cast<double>(samples_.size()));
}

double kruskal_rho_to_rhos(double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("rho must lie in [-1, 1]");
  return 6.0 / std::numbers::pi * std::asin(rho / 2.0);
}

double kruskal_rhos_to_rho(double rho_s) {
  if (!(rho_s >= -1.0 && rho_s <= 1.0)) throw DomainError("rho_s must lie in [-1, 1]");
  return 2.0 * std::sin(std::numbers::pi * rho_s / 6.0);
}

double quantile_type7(std::span<const double> samples, double p) {
  if (samples.empty()) throw InsufficientSamples("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile probability outside [0, 1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double effective_sample_size(std::span<const std::vector<double>> chains) {
  check_equal_lengths(chains);
  const std::size_t m = chains.size();
  const std::size_t n = chains.front().size();
  const double total = static_cast<double>(m * n);
  if (n < 4) return total;

  std::vector<double> means(m);
  std::vector<double> acov0(m);
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = mean_of(chains[c]);
    acov0[c] = autocovariance(chains[c], means[c], 0);
  }
  const double nd = static_cast<double>(n);
  const double w = mean_of(acov0) * nd / (nd - 1.0);
  double var_plus = w * (nd - 1.0) / nd;
  if (m > 1) var_plus += variance_of(means);
  if (!(var_plus > 0.0)) return total;

  auto rho = [&](std::size_t lag) {
    if (lag == 0) return 1.0;
    double acov = 0.0;
    for (std::size_t c = 0; c < m; ++c) acov += autocovariance(chains[c], means[c], lag);
    acov /= static_cast<double>(m);
    return 1.0 - (w - acov) / var_plus;
  };

  // Geyer: sum consecutive pairs while positive, forcing them non-increasing.
  double sum_pairs = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double pair = rho(2 * k) + rho(2 * k + 1);
    if (!(pair > 0.0)) break;
    pair = std::min(pair, previous);
    sum_pairs += pair;
    previous = pair;
  }
  const double tau = std::max(-1.0 + 2.0 * sum_pairs, 1.0 / std::log10(total));
  return std::min(total / tau, total);
}

double split_rhat(std::span<const std::vector<double>> chains) {
  check_equal_lengths(chains);
  if (chains.size() < 2) throw InsufficientSamples("split R-hat needs two chains");
  const std::size_t half = chains.front().size() / 2;
  if (half < 2) throw InsufficientSamples("split R-hat needs four draws per chain");

  std::vector<double> means;
  std::vector<double> variances;
  for (const auto& c : chains) {
    const std::span<const double> all(c);
    for (auto part : {all.first(half), all.last(half)}) {
      means.push_back(mean_of(part));
      variances.push_back(variance_of(part));
    }
  }
  const double n = static_cast<double>(half);
  const double w = mean_of(variances);
  const double b_over_n = variance_of(means);
  if (!(w > 0.0)) return 1.0;
  const double var_plus = (n - 1.0) / n * w + b_over_n;
  return std::sqrt(var_plus / w);
}

PosteriorSummary posterior_summary(std::span<const std::vector<double>> chains) {
  check_equal_lengths(chains);
  std::vector<double> pooled;
  for (const auto& c : chains) pooled.insert(pooled.end(), c.begin(), c.end());
  if (pooled.size() < kMinSummarySamples) {
    throw InsufficientSamples("posterior summary needs at least 100 draws");
  }
  PosteriorSummary summary{};
  summary.median = quantile_type7(pooled, 0.5);
  summary.ci_lower = quantile_type7(pooled, 0.025);
  summary.ci_upper = quantile_type7(pooled, 0.975);
  summary.ess = effective_sample_size(chains);
  if (chains.size() >= 2 && chains.front().size() >= 4) summary.rhat = split_rhat(chains);
  summary.draws = pooled.size();
  return summary;
}

double posterior_odds(double bf10, double prior_odds) {
  if (!(bf10 > 0.0) || !(prior_odds > 0.0)) {
    throw DomainError("Bayes factor and prior odds must be positive");
  }
  return prior_odds * bf10;
}

double jzs_log_bf10(double t, double n_effective, double df, double cauchy_scale) {
  if (!std::isfinite(t)) throw UndefinedStatistic("t statistic is not finite");
  if (!(n_effective > 0.0) || !(df > 0.0)) throw InvalidParameter("invalid sample size");
  if (!(cauchy_scale > 0.0)) throw InvalidParameter("cauchy scale must be > 0");

  // Integrate over u = log g so the integrand is smooth and unimodal-ish.
  const double a = 0.5;
  const double b = 0.5 * cauchy_scale * cauchy_scale;
  const double log_norm = a * std::log(b) - std::lgamma(a);
  const double t2 = t * t;
  const double null_term = std::log1p(t2 / df);
  auto log_h = [&](double u) {
    const double g = std::exp(u);
    const double one_ng = 1.0 + n_effective * g;
    return -0.5 * std::log(one_ng) -
           0.5 * (df + 1.0) * (std::log1p(t2 / (one_ng * df)) - null_term) + log_norm -
           (a + 1.0) * u - b / g + u;
  };

  double mode = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (double u = -40.0; u <= 40.0; u += 0.05) {
    const double v = log_h(u);
    if (v > best) {
      best = v;
      mode = u;
    }
  }
  double lo = mode;
  while (log_h(lo) - best > -60.0 && lo > mode - 500.0) lo -= 1.0;
  double hi = mode;
  while (log_h(hi) - best > -60.0 && hi < mode + 500.0) hi += 1.0;

  auto f = [&](double u) { return std::exp(log_h(u) - best); };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-12);
  return best + std::log(integral);
}

double jzs_ttest_log_bf10(std::span<const double> x, std::span<const double> y,
                          double cauchy_scale) {
  if (x.size() < 2 || y.size() < 2) throw SampleTooSmall("t-test needs two observations per group");
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double df = nx + ny - 2.0;
  const double pooled = ((nx - 1.0) * variance_of(x) + (ny - 1.0) * variance_of(y)) / df;
  if (!(pooled > 0.0)) throw UndefinedStatistic("t-test: zero pooled variance");
  const double n_eff = nx * ny / (nx + ny);
  const double t = (mean_of(y) - mean_of(x)) / std::sqrt(pooled / n_eff);
  return jzs_log_bf10(t, n_eff, df, cauchy_scale);
}

double jzs_ttest_log_bf10(std::span<const double> differences, double cauchy_scale) {
  if (differences.size() < 2) throw SampleTooSmall("t-test needs two observations");
  const double n = static_cast<double>(differences.size());
  const double var = variance_of(differences);
  if (!(var > 0.0)) throw UndefinedStatistic("t-test: zero variance");
  const double t = mean_of(differences) / std::sqrt(var / n);
  return jzs_log_bf10(t, n, n - 1.0, cauchy_scale);
}

}  // namespace latentrank

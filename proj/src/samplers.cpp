#include "latentrank/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "latentrank/distributions.hpp"
#include "latentrank/errors.hpp"
#include "latentrank/parallel.hpp"

namespace latentrank {

namespace {

double sum_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

template <typename Kernel, typename Record>
ChainOutput run_kernel(Kernel& kernel, const ChainConfig& config, std::uint32_t chain_id,
                       Record record) {
  config.validate();
  RngStream stream(config.seed, chain_id);
  ChainOutput out;
  out.chain_id = chain_id;
  out.samples.reserve(config.iterations);
  for (std::uint32_t i = 0; i < config.burnin; ++i) kernel.step(stream);
  for (std::uint32_t i = 0; i < config.iterations; ++i) {
    for (std::uint32_t t = 0; t < config.thin; ++t) kernel.step(stream);
    record(kernel, out);
  }
  return out;
}

// Joint group move (z, delta, g) -> (s z, s delta, s^2 g). The rank
// likelihood is invariant under it, every residual z_i - mean_i(delta) scales
// by s, and delta / sqrt(g) is unchanged, so with the InverseGamma(1/2, b)
// prior on g (b = gamma^2 / 2) the log acceptance ratio is
//   -(s^2 - 1) sum r_i^2 / 2 + (n - 1) log s + (b / g)(1 - s^-2).
// It lets delta and g travel multiplicatively when the ranks carry little
// information, which the latent-only moves cannot do.
double joint_scale_factor(double residual_ss, double g, double gamma, std::size_t n,
                          double step_sd, RngStream& stream) {
  const double log_s = normal_sample(stream, 0.0, step_sd);
  const double s2 = std::exp(2.0 * log_s);
  const double b = 0.5 * gamma * gamma;
  const double log_ratio = -0.5 * (s2 - 1.0) * residual_ss +
                           (static_cast<double>(n) - 1.0) * log_s + b / g * (1.0 - 1.0 / s2);
  return std::log(stream.uniform_open()) < log_ratio ? std::exp(log_s) : 1.0;
}

double joint_step_sd(std::size_t n) { return 2.0 / std::sqrt(static_cast<double>(n) + 1.0); }

}  // namespace

void PriorSpec::validate() const {
  if (!std::isfinite(cauchy_scale) || !(cauchy_scale > 0.0)) {
    throw InvalidParameter("cauchy scale must be finite and > 0");
  }
}

void ChainConfig::validate() const {
  if (iterations == 0) throw InvalidParameter("iterations must be positive");
  if (chains == 0) throw InvalidParameter("chains must be positive");
  if (thin == 0) throw InvalidParameter("thin must be positive");
  if (!std::isfinite(scale_step_sd) || !(scale_step_sd > 0.0)) {
    throw InvalidParameter("scale step must be finite and > 0");
  }
}

DeltaConditional delta_conditional_twosample(std::span<const double> z_x,
                                             std::span<const double> z_y, double g) {
  if (!(g > 0.0)) throw InvalidParameter("g must be > 0");
  const double n = static_cast<double>(z_x.size() + z_y.size());
  const double denom = g * n + 4.0;
  return {2.0 * g * (sum_of(z_y) - sum_of(z_x)) / denom, 4.0 * g / denom};
}

DeltaConditional delta_conditional_onesample(std::span<const double> z_d, double g) {
  if (!(g > 0.0)) throw InvalidParameter("g must be > 0");
  const double n = static_cast<double>(z_d.size());
  const double denom = g * n + 1.0;
  return {g * sum_of(z_d) / denom, g / denom};
}

double g_conditional(double delta, double gamma, RngStream& stream) {
  if (!std::isfinite(gamma) || !(gamma > 0.0)) throw InvalidParameter("gamma must be > 0");
  return inverse_gamma_sample(stream, 1.0, 0.5 * (delta * delta + gamma * gamma));
}

double bivariate_normal_loglik(std::span<const double> z_x, std::span<const double> z_y,
                               double rho) {
  if (!(std::fabs(rho) < 1.0)) throw DomainError("bivariate normal requires |rho| < 1");
  if (z_x.size() != z_y.size()) throw InvalidData("latent margins differ in length");
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < z_x.size(); ++i) {
    sxx += z_x[i] * z_x[i];
    syy += z_y[i] * z_y[i];
    sxy += z_x[i] * z_y[i];
  }
  const double one_minus = 1.0 - rho * rho;
  const double n = static_cast<double>(z_x.size());
  return -n * std::log(2.0 * std::numbers::pi) - 0.5 * n * std::log(one_minus) -
         (sxx - 2.0 * rho * sxy + syy) / (2.0 * one_minus);
}

// RankSumKernel --------------------------------------------------------------

RankSumKernel::RankSumKernel(LatentVector latent, std::size_t n_x, const PriorSpec& prior,
                             double delta, double g)
    : latent_(std::move(latent)),
      n_x_(n_x),
      gamma_(prior.cauchy_scale),
      delta_(delta),
      g_(g),
      means_(latent_.size()) {
  prior.validate();
  if (n_x_ > latent_.size()) throw InvalidData("group split exceeds latent length");
}

void RankSumKernel::step(RngStream& stream) {
  const std::size_t n = latent_.size();
  for (std::size_t i = 0; i < n; ++i) means_[i] = i < n_x_ ? -0.5 * delta_ : 0.5 * delta_;
  gibbs_sweep(latent_, means_, 1.0, stream);
  if (decorrelate_) {
    decorrelate_shift(latent_, n_x_, delta_, stream);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = latent_[i] - (i < n_x_ ? -0.5 * delta_ : 0.5 * delta_);
      ss += r * r;
    }
    const double s = joint_scale_factor(ss, g_, gamma_, n, joint_step_sd(n), stream);
    if (s != 1.0) {
      latent_.scale(s);
      delta_ *= s;
      g_ *= s * s;
    }
  }
  const auto z = latent_.values();
  conditional_ = delta_conditional_twosample(z.first(n_x_), z.subspan(n_x_), g_);
  delta_ = normal_sample(stream, conditional_.mean, std::sqrt(conditional_.variance));
  g_ = g_conditional(delta_, gamma_, stream);
}

// SignedRankKernel -----------------------------------------------------------

SignedRankKernel::SignedRankKernel(SignedLatentVector latent, const PriorSpec& prior,
                                   double scale_step_sd, double delta, double g)
    : latent_(std::move(latent)),
      gamma_(prior.cauchy_scale),
      step_sd_(scale_step_sd),
      delta_(delta),
      g_(g) {
  prior.validate();
}

void SignedRankKernel::step(RngStream& stream) {
  gibbs_sweep(latent_, delta_, 1.0, stream);
  if (decorrelate_) {
    decorrelate_scale(latent_, delta_, step_sd_, stream);
    double ss = 0.0;
    for (double z : latent_.values()) ss += (z - delta_) * (z - delta_);
    const double s =
        joint_scale_factor(ss, g_, gamma_, latent_.size(), joint_step_sd(latent_.size()), stream);
    if (s != 1.0) {
      latent_.scale(s);
      delta_ *= s;
      g_ *= s * s;
    }
  }
  conditional_ = delta_conditional_onesample(latent_.values(), g_);
  delta_ = normal_sample(stream, conditional_.mean, std::sqrt(conditional_.variance));
  g_ = g_conditional(delta_, gamma_, stream);
}

// SpearmanKernel -------------------------------------------------------------

SpearmanKernel::SpearmanKernel(LatentVector x, LatentVector y, double scale_step_sd, double rho)
    : x_(std::move(x)), y_(std::move(y)), step_sd_(scale_step_sd), rho_(rho) {
  if (x_.size() != y_.size()) throw InvalidData("spearman margins differ in length");
  if (x_.size() <= 3) throw SampleTooSmall("spearman sampler needs n > 3");
  if (!(std::fabs(rho_) < 1.0)) throw DomainError("initial rho must satisfy |rho| < 1");
  proposal_sd_ = 1.0 / std::sqrt(static_cast<double>(x_.size()) - 3.0);
  means_.resize(x_.size());
}

double SpearmanKernel::log_acceptance(double proposal) const {
  if (!(std::fabs(proposal) < 1.0)) return -std::numeric_limits<double>::infinity();
  return bivariate_normal_loglik(x_.values(), y_.values(), proposal) -
         bivariate_normal_loglik(x_.values(), y_.values(), rho_) +
         std::log1p(-proposal * proposal) - std::log1p(-rho_ * rho_);
}

void SpearmanKernel::step(RngStream& stream) {
  const std::size_t n = x_.size();
  const double sd = std::sqrt(1.0 - rho_ * rho_);

  for (std::size_t i = 0; i < n; ++i) means_[i] = rho_ * y_[i];
  gibbs_sweep(x_, means_, sd, stream);
  for (std::size_t i = 0; i < n; ++i) means_[i] = rho_ * x_[i];
  gibbs_sweep(y_, means_, sd, stream);

  if (decorrelate_) {
    for (std::size_t i = 0; i < n; ++i) means_[i] = rho_ * y_[i];
    decorrelate_scale(x_, means_, sd, step_sd_, stream);
    for (std::size_t i = 0; i < n; ++i) means_[i] = rho_ * x_[i];
    decorrelate_scale(y_, means_, sd, step_sd_, stream);
  }

  const double proposal = std::tanh(normal_sample(stream, std::atanh(rho_), proposal_sd_));
  ++proposals_;
  if (std::log(stream.uniform_open()) < log_acceptance(proposal)) {
    rho_ = proposal;
    ++accepted_;
  }
}

// Chains ---------------------------------------------------------------------

ChainOutput ranksum_chain(std::span<const double> x, std::span<const double> y,
                          const PriorSpec& prior, const ChainConfig& config,
                          std::uint32_t chain_id) {
  if (prior.kind != PriorSpec::Kind::cauchy_on_delta) {
    throw InvalidParameter("rank sum sampler needs a Cauchy prior on delta");
  }
  RankSumKernel kernel(LatentVector(aggregated_midranks(x, y)), x.size(), prior, 0.0,
                       prior.cauchy_scale * prior.cauchy_scale);
  kernel.set_decorrelation(config.decorrelate);
  return run_kernel(kernel, config, chain_id, [](const RankSumKernel& k, ChainOutput& out) {
    out.samples.push_back(k.delta());
    out.conditionals.push_back({k.conditional().mean, std::sqrt(k.conditional().variance)});
  });
}

ChainOutput signedrank_chain(std::span<const double> differences, const PriorSpec& prior,
                             const ChainConfig& config, std::uint32_t chain_id) {
  if (prior.kind != PriorSpec::Kind::cauchy_on_delta) {
    throw InvalidParameter("signed rank sampler needs a Cauchy prior on delta");
  }
  const SignedRankDecomposition decomposition = decompose_differences(differences);
  if (decomposition.size() == 0) {
    throw UndefinedStatistic("signed rank sampler: all differences are zero");
  }
  SignedRankKernel kernel(SignedLatentVector(decomposition), prior, config.scale_step_sd, 0.0,
                          prior.cauchy_scale * prior.cauchy_scale);
  kernel.set_decorrelation(config.decorrelate);
  return run_kernel(kernel, config, chain_id, [](const SignedRankKernel& k, ChainOutput& out) {
    out.samples.push_back(k.delta());
    out.conditionals.push_back({k.conditional().mean, std::sqrt(k.conditional().variance)});
  });
}

ChainOutput spearman_chain(std::span<const double> x, std::span<const double> y,
                           const PriorSpec& prior, const ChainConfig& config,
                           std::uint32_t chain_id) {
  if (prior.kind != PriorSpec::Kind::uniform_on_rho) {
    throw InvalidParameter("spearman sampler needs a uniform prior on rho");
  }
  if (x.size() != y.size()) throw InvalidData("paired samples differ in length");
  if (x.size() <= 3) throw SampleTooSmall("spearman sampler needs n > 3");
  SpearmanKernel kernel(LatentVector(midranks(x)), LatentVector(midranks(y)),
                        config.scale_step_sd);
  kernel.set_decorrelation(config.decorrelate);
  ChainOutput out = run_kernel(kernel, config, chain_id,
                               [](const SpearmanKernel& k, ChainOutput& o) {
                                 o.samples.push_back(k.rho());
                               });
  out.acceptance_rate = kernel.proposals() == 0
                            ? 0.0
                            : static_cast<double>(kernel.accepted()) /
                                  static_cast<double>(kernel.proposals());
  return out;
}

std::vector<ChainOutput> run_chains(const std::function<ChainOutput(std::uint32_t)>& chain,
                                    const ChainConfig& config) {
  config.validate();
  std::vector<ChainOutput> outputs(config.chains);
  detail::parallel_for(config.chains, config.threads, [&](std::size_t c) {
    outputs[c] = chain(static_cast<std::uint32_t>(c));
  });
  return outputs;
}

}  // namespace latentrank

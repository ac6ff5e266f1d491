#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "latentrank/augmentation.hpp"
#include "latentrank/ranks.hpp"
#include "latentrank/rng.hpp"

namespace latentrank {

struct PriorSpec {
  enum class Kind { cauchy_on_delta, uniform_on_rho };

  Kind kind = Kind::cauchy_on_delta;
  double cauchy_scale = 1.0 / std::numbers::sqrt2;

  static PriorSpec cauchy(double scale = 1.0 / std::numbers::sqrt2) {
    return {Kind::cauchy_on_delta, scale};
  }
  static PriorSpec uniform_rho() { return {Kind::uniform_on_rho, 1.0 / std::numbers::sqrt2}; }

  /// Throws InvalidParameter on a non-positive or non-finite scale.
  void validate() const;
};

/// MCMC settings. Each chain runs `burnin` warm-up steps, then retains
/// `iterations` draws, keeping every `thin`-th step.
struct ChainConfig {
  std::uint32_t iterations = 5000;
  std::uint32_t burnin = 1000;
  std::uint32_t chains = 4;
  std::uint32_t thin = 1;
  std::uint64_t seed = 1;
  /// Worker threads for running chains; 0 picks the hardware concurrency.
  unsigned threads = 0;
  /// Log-scale step of the multiplicative decorrelating move.
  double scale_step_sd = 0.5;
  /// Apply the group moves (location, latent scale, joint scale) after each
  /// latent sweep.
  bool decorrelate = true;

  /// Throws InvalidParameter for zero iterations/chains/thin or a
  /// non-positive step.
  void validate() const;
};

struct NormalParams {
  double mean;
  double sd;
};

/// Normal full conditional of delta, as mean and variance.
struct DeltaConditional {
  double mean;
  double variance;
};

struct ChainOutput {
  /// delta or rho, one per retained iteration.
  std::vector<double> samples;
  /// Conditional (mean, sd) of delta at each retained iteration; empty for rho.
  std::vector<NormalParams> conditionals;
  /// Metropolis acceptance rate of the rho update (rho chains only).
  double acceptance_rate = 1.0;
  std::uint32_t chain_id = 0;
};

/// Two-sample conditional: mean 2g(n_y mean(z_y) - n_x mean(z_x)) / (g(n_x+n_y)+4),
/// variance 4g / (g(n_x+n_y)+4).
DeltaConditional delta_conditional_twosample(std::span<const double> z_x,
                                             std::span<const double> z_y, double g);

/// One-sample conditional: mean g n mean(z_d) / (g n + 1), variance g / (g n + 1).
DeltaConditional delta_conditional_onesample(std::span<const double> z_d, double g);

/// g | delta ~ InverseGamma(1, (delta^2 + gamma^2) / 2).
double g_conditional(double delta, double gamma, RngStream& stream);

/// Sum of standard bivariate normal log densities with correlation rho.
/// Throws DomainError unless |rho| < 1.
double bivariate_normal_loglik(std::span<const double> z_x, std::span<const double> z_y,
                               double rho);

/// Transition kernel of the rank sum sampler. The latent vector is the joint
/// ranking of x (first n_x entries) followed by y.
class RankSumKernel {
 public:
  RankSumKernel(LatentVector latent, std::size_t n_x, const PriorSpec& prior,
                double delta = 0.0, double g = 1.0);

  /// One cycle: sweep x, sweep y, location move, joint (z, delta, g) scale
  /// move, delta | z, g | delta.
  void step(RngStream& stream);

  double delta() const { return delta_; }
  double g() const { return g_; }
  const DeltaConditional& conditional() const { return conditional_; }
  const LatentVector& latent() const { return latent_; }
  void set_decorrelation(bool enabled) { decorrelate_ = enabled; }

 private:
  LatentVector latent_;
  std::size_t n_x_;
  bool decorrelate_ = true;
  double gamma_;
  double delta_;
  double g_;
  DeltaConditional conditional_{0.0, 1.0};
  std::vector<double> means_;
};

/// Transition kernel of the signed rank sampler.
class SignedRankKernel {
 public:
  SignedRankKernel(SignedLatentVector latent, const PriorSpec& prior, double scale_step_sd,
                   double delta = 0.0, double g = 1.0);

  /// One cycle: sweep z_d, latent scale move, joint (z, delta, g) scale move,
  /// delta | z, g | delta.
  void step(RngStream& stream);

  double delta() const { return delta_; }
  double g() const { return g_; }
  const DeltaConditional& conditional() const { return conditional_; }
  const SignedLatentVector& latent() const { return latent_; }
  void set_decorrelation(bool enabled) { decorrelate_ = enabled; }

 private:
  SignedLatentVector latent_;
  bool decorrelate_ = true;
  double gamma_;
  double step_sd_;
  double delta_;
  double g_;
  DeltaConditional conditional_{0.0, 1.0};
};

/// Metropolis-within-Gibbs kernel for the latent correlation. The proposal is
/// a random walk on atanh(rho) with sd 1/sqrt(n-3); acceptance includes the
/// (1 - rho^2) Jacobian so the chain targets a uniform prior on rho.
class SpearmanKernel {
 public:
  /// Throws SampleTooSmall for n <= 3.
  SpearmanKernel(LatentVector x, LatentVector y, double scale_step_sd, double rho = 0.0);

  /// One cycle: sweep x | y, sweep y | x, per-margin scale moves, rho update.
  void step(RngStream& stream);

  double rho() const { return rho_; }
  const LatentVector& x() const { return x_; }
  const LatentVector& y() const { return y_; }
  std::uint64_t proposals() const { return proposals_; }
  std::uint64_t accepted() const { return accepted_; }
  void set_decorrelation(bool enabled) { decorrelate_ = enabled; }

  /// Log acceptance ratio for moving from the current rho to `proposal`.
  double log_acceptance(double proposal) const;

 private:
  LatentVector x_;
  LatentVector y_;
  double step_sd_;
  double proposal_sd_;
  double rho_;
  bool decorrelate_ = true;
  std::uint64_t proposals_ = 0;
  std::uint64_t accepted_ = 0;
  std::vector<double> means_;
};

/// Rank sum chain. Empty groups are accepted (the chain then samples the
/// prior).
ChainOutput ranksum_chain(std::span<const double> x, std::span<const double> y,
                          const PriorSpec& prior, const ChainConfig& config,
                          std::uint32_t chain_id);

/// Signed rank chain on difference scores; zeros are dropped first. Throws
/// UndefinedStatistic when no nonzero difference remains.
ChainOutput signedrank_chain(std::span<const double> differences, const PriorSpec& prior,
                             const ChainConfig& config, std::uint32_t chain_id);

/// Spearman chain. Throws SampleTooSmall for n <= 3.
ChainOutput spearman_chain(std::span<const double> x, std::span<const double> y,
                           const PriorSpec& prior, const ChainConfig& config,
                           std::uint32_t chain_id);

/// Runs `config.chains` chains, in parallel when more than one thread is
/// available. Output is ordered by chain id regardless of scheduling.
std::vector<ChainOutput> run_chains(const std::function<ChainOutput(std::uint32_t)>& chain,
                                    const ChainConfig& config);

}  // namespace latentrank

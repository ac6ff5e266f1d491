#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latentrank/ranks.hpp"
#include "latentrank/rng.hpp"
#include "latentrank/samplers.hpp"

namespace latentrank {

enum class Family { normal, skew_normal, cauchy, logistic, uniform };

std::string_view to_string(Family family);
/// Accepts "normal", "skew-normal", "cauchy", "logistic", "uniform".
/// Throws ConfigurationError otherwise.
Family parse_family(std::string_view name);

struct DistributionSpec {
  Family family = Family::normal;
  /// Skew-normal shape; ignored by the other families.
  double shape = 20.0;
  /// Added to every draw.
  double shift = 0.0;
};

/// n draws from the unit-scale member of the family plus `shift`. Skew-normal
/// uses the half-normal convolution representation.
Sample sample_univariate(const DistributionSpec& spec, std::size_t n, RngStream& stream);

enum class CopulaFamily { gaussian, clayton, frank, gumbel };

std::string_view to_string(CopulaFamily family);
CopulaFamily parse_copula(std::string_view name);

/// theta is the latent correlation for the Gaussian copula and the usual
/// dependence parameter otherwise. The independence copula is theta = 0 for
/// Gaussian, Clayton and Frank, and theta = 1 for Gumbel.
struct CopulaSpec {
  CopulaFamily family = CopulaFamily::gaussian;
  double theta = 0.0;
  std::optional<double> target_rho_s;

  /// Throws DomainError for an inadmissible theta.
  void validate() const;
  static CopulaSpec independence(CopulaFamily family);
};

/// Population Spearman correlation of the copula.
double copula_rho_s(const CopulaSpec& spec);

/// Finds theta with |copula_rho_s - target| <= 1e-4 by bisection. Throws
/// ConfigurationError when the family cannot reach the target.
CopulaSpec invert_rho_s(CopulaFamily family, double target_rho_s);

struct UnitPairs {
  std::vector<double> u;
  std::vector<double> v;
};

UnitPairs copula_sample(const CopulaSpec& spec, std::size_t n, RngStream& stream);

enum class TestKind { ranksum, signedrank, spearman };

std::string_view to_string(TestKind test);
TestKind parse_test(std::string_view name);

enum class Scenario { same_shape, normal_vs_other };

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view name);

struct SimulationGridSpec {
  /// Location shifts for the delta tests, target rho_s for Spearman.
  std::vector<double> effect_values{0.0, 0.5, 1.5};
  std::vector<std::size_t> n_values{10, 20, 50};
  std::size_t replicates = 100;
  /// same_shape: both groups from `distribution`. normal_vs_other: the first
  /// group is standard normal.
  Scenario scenario = Scenario::same_shape;
  DistributionSpec distribution{Family::logistic, 20.0, 0.0};
  CopulaFamily copula = CopulaFamily::clayton;
  std::uint64_t seed = 1;
  /// Also compute the default t-test Bayes factor (delta tests only).
  bool comparator = true;
  /// Record wall-clock seconds per replicate. Off by default so output is
  /// reproducible byte for byte.
  bool timing = false;

  void validate(TestKind test) const;
};

struct GridRow {
  std::string test;
  std::string family;
  std::string scenario;
  std::size_t n;
  double effect;
  std::size_t replicate;
  /// rho_rb, rho_mrb or observed rho_s.
  double statistic;
  double log_bf10;
  std::optional<double> comparator_log_bf10;
  std::optional<double> runtime_seconds;
};

/// One row per (effect, n, replicate), ordered by effect, then n, then
/// replicate. Replicate r of cell c draws its data from stream 0xFFFFFFFF of
/// derive_seed(seed, c, r) and runs its chains from the same seed.
std::vector<GridRow> run_grid(const SimulationGridSpec& grid, TestKind test,
                              const PriorSpec& prior, const ChainConfig& config);

inline constexpr std::string_view kGridCsvHeader =
    "test,family,scenario,n,effect,replicate,statistic,log_bf10,comparator_log_bf10,"
    "runtime_seconds";

/// Writes kGridCsvHeader and one line per row; missing values print as NA.
void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows);

}  // namespace latentrank

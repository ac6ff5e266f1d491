#include "latentrank/simgen.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "latentrank/distributions.hpp"
#include "latentrank/errors.hpp"
#include "latentrank/inference.hpp"
#include "latentrank/parallel.hpp"

namespace latentrank {

namespace {

constexpr std::uint32_t kDataStream = 0xFFFFFFFFU;
constexpr double kInversionTolerance = 1e-4;

// Gauss-Legendre nodes and weights mapped to [0, 1].
const std::vector<std::pair<double, double>>& unit_legendre() {
  static const std::vector<std::pair<double, double>> nodes = [] {
    using rule = boost::math::quadrature::gauss<double, 64>;
    std::vector<std::pair<double, double>> out;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      out.emplace_back(0.5 + 0.5 * x[i], 0.5 * w[i]);
      if (x[i] != 0.0) out.emplace_back(0.5 - 0.5 * x[i], 0.5 * w[i]);
    }
    return out;
  }();
  return nodes;
}

double clayton_cdf(double u, double v, double theta) {
  // log(u^-theta + v^-theta - 1) evaluated around the larger exponent.
  const double a = -theta * std::log(u);
  const double b = -theta * std::log(v);
  const double m = std::max(a, b);
  const double s = m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
  return std::exp(-s / theta);
}

double gumbel_cdf(double u, double v, double theta) {
  const double s = std::pow(-std::log(u), theta) + std::pow(-std::log(v), theta);
  return std::exp(-std::pow(s, 1.0 / theta));
}

// rho_s = 12 * integral of C - 3. For an exchangeable copula the square is
// twice the triangle v < u; v = u t maps the triangle to the unit square and
// keeps the diagonal kink on the boundary.
template <typename Cdf>
double exchangeable_rho_s(Cdf cdf) {
  double total = 0.0;
  for (const auto& [u, wu] : unit_legendre()) {
    double inner = 0.0;
    for (const auto& [t, wt] : unit_legendre()) inner += wt * cdf(u, u * t);
    total += wu * u * inner;
  }
  return 24.0 * total - 3.0;
}

double debye(int k, double x) {
  auto f = [k](double t) { return t == 0.0 ? (k == 1 ? 1.0 : 0.0) : std::pow(t, k) / std::expm1(t); };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, x, 15, 1e-13);
  return k / std::pow(x, k) * integral;
}

double frank_rho_s(double theta) {
  const double a = std::fabs(theta);
  double rho = a < 1e-4 ? a / 6.0 : 1.0 - 12.0 / a * (debye(1, a) - debye(2, a));
  return theta < 0.0 ? -rho : rho;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::normal: return "normal";
    case Family::skew_normal: return "skew-normal";
    case Family::cauchy: return "cauchy";
    case Family::logistic: return "logistic";
    case Family::uniform: return "uniform";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::normal, Family::skew_normal, Family::cauchy, Family::logistic,
                   Family::uniform}) {
    if (name == to_string(f)) return f;
  }
  throw ConfigurationError("unknown distribution family: " + std::string(name));
}

Sample sample_univariate(const DistributionSpec& spec, std::size_t n, RngStream& stream) {
  if (!std::isfinite(spec.shift)) throw ConfigurationError("shift must be finite");
  if (n == 0) throw ConfigurationError("sample size must be positive");
  Sample out(n);
  const double skew = spec.shape / std::sqrt(1.0 + spec.shape * spec.shape);
  for (double& value : out) {
    switch (spec.family) {
      case Family::normal:
        value = normal_sample(stream, 0.0, 1.0);
        break;
      case Family::skew_normal: {
        const double h = std::fabs(normal_sample(stream, 0.0, 1.0));
        value = skew * h + std::sqrt(1.0 - skew * skew) * normal_sample(stream, 0.0, 1.0);
        break;
      }
      case Family::cauchy:
        value = std::tan(std::numbers::pi * (stream.uniform_open() - 0.5));
        break;
      case Family::logistic: {
        const double u = stream.uniform_open();
        value = std::log(u / (1.0 - u));
        break;
      }
      case Family::uniform:
        value = stream.uniform();
        break;
    }
    value += spec.shift;
  }
  return out;
}

std::string_view to_string(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::gaussian: return "gaussian";
    case CopulaFamily::clayton: return "clayton";
    case CopulaFamily::frank: return "frank";
    case CopulaFamily::gumbel: return "gumbel";
  }
  return "unknown";
}

CopulaFamily parse_copula(std::string_view name) {
  for (CopulaFamily f :
       {CopulaFamily::gaussian, CopulaFamily::clayton, CopulaFamily::frank, CopulaFamily::gumbel}) {
    if (name == to_string(f)) return f;
  }
  throw ConfigurationError("unknown copula family: " + std::string(name));
}

void CopulaSpec::validate() const {
  if (!std::isfinite(theta)) throw DomainError("copula parameter must be finite");
  switch (family) {
    case CopulaFamily::gaussian:
      if (!(std::fabs(theta) < 1.0)) throw DomainError("gaussian copula needs |rho| < 1");
      break;
    case CopulaFamily::clayton:
      if (theta < 0.0) throw DomainError("clayton copula needs theta >= 0");
      break;
    case CopulaFamily::gumbel:
      if (theta < 1.0) throw DomainError("gumbel copula needs theta >= 1");
      break;
    case CopulaFamily::frank:
      break;
  }
}

CopulaSpec CopulaSpec::independence(CopulaFamily family) {
  return {family, family == CopulaFamily::gumbel ? 1.0 : 0.0, 0.0};
}

double copula_rho_s(const CopulaSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case CopulaFamily::gaussian:
      return kruskal_rho_to_rhos(spec.theta);
    case CopulaFamily::frank:
      return frank_rho_s(spec.theta);
    case CopulaFamily::clayton:
      if (spec.theta == 0.0) return 0.0;
      return exchangeable_rho_s([&](double u, double v) { return clayton_cdf(u, v, spec.theta); });
    case CopulaFamily::gumbel:
      if (spec.theta == 1.0) return 0.0;
      return exchangeable_rho_s([&](double u, double v) { return gumbel_cdf(u, v, spec.theta); });
  }
  return 0.0;
}

CopulaSpec invert_rho_s(CopulaFamily family, double target) {
  if (!(std::fabs(target) < 1.0)) throw ConfigurationError("target rho_s must lie in (-1, 1)");
  CopulaSpec spec = CopulaSpec::independence(family);
  spec.target_rho_s = target;
  if (target == 0.0) return spec;

  if (family == CopulaFamily::gaussian) {
    spec.theta = kruskal_rhos_to_rho(target);
    return spec;
  }
  if (target < 0.0 && family != CopulaFamily::frank) {
    throw ConfigurationError(std::string(to_string(family)) +
                             " copula cannot produce negative rho_s");
  }

  // Frank is odd in theta, so search on |target| and restore the sign.
  const double goal = std::fabs(target);
  auto rho_at = [&](double theta) { return copula_rho_s({family, theta, std::nullopt}); };
  double lo = spec.theta;
  double hi = lo + 1.0;
  while (rho_at(hi) < goal) {
    lo = hi;
    hi = spec.theta + 2.0 * (hi - spec.theta);
    if (hi > 500.0) throw ConfigurationError("target rho_s too close to 1 for this family");
  }
  double mid = 0.5 * (lo + hi);
  while (hi - lo > 1e-10) {
    mid = 0.5 * (lo + hi);
    (rho_at(mid) < goal ? lo : hi) = mid;
  }
  mid = 0.5 * (lo + hi);
  if (std::fabs(rho_at(mid) - goal) > kInversionTolerance) {
    throw ConfigurationError("copula inversion did not reach the target rho_s");
  }
  spec.theta = target < 0.0 ? -mid : mid;
  return spec;
}

UnitPairs copula_sample(const CopulaSpec& spec, std::size_t n, RngStream& stream) {
  spec.validate();
  UnitPairs out;
  out.u.resize(n);
  out.v.resize(n);
  const double theta = spec.theta;
  for (std::size_t i = 0; i < n; ++i) {
    double u = 0.0;
    double v = 0.0;
    switch (spec.family) {
      case CopulaFamily::gaussian: {
        const double z1 = normal_sample(stream, 0.0, 1.0);
        const double z2 =
            theta * z1 + std::sqrt(1.0 - theta * theta) * normal_sample(stream, 0.0, 1.0);
        u = normal_cdf(z1);
        v = normal_cdf(z2);
        break;
      }
      case CopulaFamily::clayton: {
        if (theta == 0.0) {
          u = stream.uniform_open();
          v = stream.uniform_open();
          break;
        }
        // Gamma frailty (Marshall-Olkin).
        const double frailty = gamma_sample(stream, 1.0 / theta, 1.0);
        u = std::pow(1.0 + exponential_sample(stream) / frailty, -1.0 / theta);
        v = std::pow(1.0 + exponential_sample(stream) / frailty, -1.0 / theta);
        break;
      }
      case CopulaFamily::gumbel: {
        // Positive-stable frailty with Laplace transform exp(-s^alpha),
        // generated by Kanter's representation.
        const double alpha = 1.0 / theta;
        double frailty = 1.0;
        if (alpha < 1.0) {
          const double angle = std::numbers::pi * stream.uniform_open();
          const double w = exponential_sample(stream);
          frailty = std::sin(alpha * angle) / std::pow(std::sin(angle), 1.0 / alpha) *
                    std::pow(std::sin((1.0 - alpha) * angle) / w, (1.0 - alpha) / alpha);
        }
        u = std::exp(-std::pow(exponential_sample(stream) / frailty, alpha));
        v = std::exp(-std::pow(exponential_sample(stream) / frailty, alpha));
        break;
      }
      case CopulaFamily::frank: {
        u = stream.uniform_open();
        const double w = stream.uniform_open();
        if (theta == 0.0) {
          v = w;
          break;
        }
        v = -std::log1p(w * std::expm1(-theta) / (w + (1.0 - w) * std::exp(-theta * u))) /
            theta;
        break;
      }
    }
    out.u[i] = u;
    out.v[i] = v;
  }
  return out;
}

std::string_view to_string(TestKind test) {
  switch (test) {
    case TestKind::ranksum: return "ranksum";
    case TestKind::signedrank: return "signedrank";
    case TestKind::spearman: return "spearman";
  }
  return "unknown";
}

TestKind parse_test(std::string_view name) {
  for (TestKind t : {TestKind::ranksum, TestKind::signedrank, TestKind::spearman}) {
    if (name == to_string(t)) return t;
  }
  throw ConfigurationError("unknown test: " + std::string(name));
}

std::string_view to_string(Scenario scenario) {
  return scenario == Scenario::same_shape ? "same-shape" : "normal-vs-other";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "same-shape") return Scenario::same_shape;
  if (name == "normal-vs-other") return Scenario::normal_vs_other;
  throw ConfigurationError("unknown scenario: " + std::string(name));
}

void SimulationGridSpec::validate(TestKind test) const {
  if (effect_values.empty()) throw ConfigurationError("grid needs at least one effect value");
  if (n_values.empty()) throw ConfigurationError("grid needs at least one sample size");
  if (replicates == 0) throw ConfigurationError("replicates must be positive");
  for (double e : effect_values) {
    if (!std::isfinite(e)) throw ConfigurationError("effect values must be finite");
  }
  for (std::size_t n : n_values) {
    if (n == 0) throw ConfigurationError("sample sizes must be positive");
    if (test == TestKind::spearman && n < 4) {
      throw ConfigurationError("spearman grids need n >= 4");
    }
  }
}

std::vector<GridRow> run_grid(const SimulationGridSpec& grid, TestKind test,
                              const PriorSpec& prior, const ChainConfig& config) {
  grid.validate(test);
  config.validate();

  std::vector<CopulaSpec> copulas;
  if (test == TestKind::spearman) {
    for (double effect : grid.effect_values) copulas.push_back(invert_rho_s(grid.copula, effect));
  }

  const std::size_t cells = grid.effect_values.size() * grid.n_values.size();
  std::vector<GridRow> rows(cells * grid.replicates);

  ChainConfig chain_config = config;
  const unsigned threads = config.threads;
  chain_config.threads = 1;

  detail::parallel_for(rows.size(), threads, [&](std::size_t index) {
    const std::size_t cell = index / grid.replicates;
    const std::size_t replicate = index % grid.replicates;
    const std::size_t effect_index = cell / grid.n_values.size();
    const std::size_t n = grid.n_values[cell % grid.n_values.size()];
    const double effect = grid.effect_values[effect_index];
    const auto start = std::chrono::steady_clock::now();

    ChainConfig local = chain_config;
    local.seed = derive_seed(grid.seed, cell, replicate);
    RngStream data_stream(local.seed, kDataStream);

    GridRow row;
    row.test = to_string(test);
    row.scenario = to_string(grid.scenario);
    row.n = n;
    row.effect = effect;
    row.replicate = replicate;

    if (test == TestKind::spearman) {
      row.family = to_string(grid.copula);
      const UnitPairs pairs = copula_sample(copulas[effect_index], n, data_stream);
      row.statistic = spearman_rho(pairs.u, pairs.v);
      const auto chains = run_chains(
          [&](std::uint32_t id) { return spearman_chain(pairs.u, pairs.v, prior, local, id); },
          local);
      row.log_bf10 = savage_dickey_rho(chains).log_bf10;
    } else {
      row.family = to_string(grid.distribution.family);
      DistributionSpec first = grid.distribution;
      first.shift = 0.0;
      if (grid.scenario == Scenario::normal_vs_other) first.family = Family::normal;
      DistributionSpec second = grid.distribution;
      second.shift = effect;
      const Sample x = sample_univariate(first, n, data_stream);
      const Sample y = sample_univariate(second, n, data_stream);

      if (test == TestKind::ranksum) {
        row.statistic = rank_biserial(x, y);
        const auto chains = run_chains(
            [&](std::uint32_t id) { return ranksum_chain(x, y, prior, local, id); }, local);
        row.log_bf10 = savage_dickey_delta(chains, prior).log_bf10;
        if (grid.comparator) row.comparator_log_bf10 = jzs_ttest_log_bf10(x, y, prior.cauchy_scale);
      } else {
        Sample d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = y[i] - x[i];
        row.statistic = matched_rank_biserial(decompose_differences(d));
        const auto chains = run_chains(
            [&](std::uint32_t id) { return signedrank_chain(d, prior, local, id); }, local);
        row.log_bf10 = savage_dickey_delta(chains, prior).log_bf10;
        if (grid.comparator) row.comparator_log_bf10 = jzs_ttest_log_bf10(d, prior.cauchy_scale);
      }
    }

    if (grid.timing) {
      row.runtime_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    rows[index] = std::move(row);
  });
  return rows;
}

void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows) {
  out << kGridCsvHeader << '\n';
  auto optional_field = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("NA");
  };
  for (const GridRow& row : rows) {
    out << row.test << ',' << row.family << ',' << row.scenario << ',' << row.n << ','
        << format_double(row.effect) << ',' << row.replicate << ','
        << format_double(row.statistic) << ',' << format_double(row.log_bf10) << ','
        << optional_field(row.comparator_log_bf10) << ',' << optional_field(row.runtime_seconds)
        << '\n';
  }
}

}  // namespace latentrank

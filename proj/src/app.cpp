#include "latentrank/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "latentrank/csv.hpp"
#include "latentrank/distributions.hpp"
#include "latentrank/errors.hpp"
#include "latentrank/inference.hpp"
#include "latentrank/ranks.hpp"

namespace latentrank {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kRhatWarning = 1.01;
constexpr double kEssWarning = 400.0;

// Data as selected from the input table.
struct Selection {
  Sample x;
  Sample y;
  Sample differences;
  Json columns;
};

// Pooled chains by chain, for the summary functions.
std::vector<std::vector<double>> chain_samples(const std::vector<ChainOutput>& chains) {
  std::vector<std::vector<double>> out;
  out.reserve(chains.size());
  for (const auto& c : chains) out.push_back(c.samples);
  return out;
}

Json summary_json(const std::string& parameter, const PosteriorSummary& s) {
  Json j;
  j["parameter"] = parameter;
  j["median"] = s.median;
  j["ci_level"] = 0.95;
  j["ci_lower"] = s.ci_lower;
  j["ci_upper"] = s.ci_upper;
  j["draws"] = s.draws;
  return j;
}

Json bf_json(const BayesFactorResult& bf) {
  Json j;
  j["null_value"] = 0.0;
  j["bf10"] = bf.bf10;
  j["bf01"] = bf.bf01;
  j["log_bf10"] = bf.log_bf10;
  j["prior_ordinate"] = bf.prior_ordinate;
  j["posterior_ordinate"] = bf.posterior_ordinate;
  j["method"] = std::string(to_string(bf.method));
  return j;
}

Selection select_columns(const TestRequest& request, const CsvTable& table) {
  Selection s;
  switch (request.test) {
    case TestKind::ranksum:
      if (request.value) {
        const Sample values = table.numeric_column(*request.value);
        const std::vector<std::string> groups = table.text_column(*request.group);
        const std::set<std::string> levels(groups.begin(), groups.end());
        if (levels.size() != 2) {
          throw ConfigurationError("group column '" + *request.group + "' must have exactly 2 levels, found " +
                                   std::to_string(levels.size()));
        }
        const std::string& first = *levels.begin();
        for (std::size_t i = 0; i < values.size(); ++i) {
          (groups[i] == first ? s.x : s.y).push_back(values[i]);
        }
        s.columns["value"] = *request.value;
        s.columns["group"] = *request.group;
        s.columns["x_level"] = first;
        s.columns["y_level"] = *levels.rbegin();
      } else {
        s.x = table.numeric_column(*request.x);
        s.y = table.numeric_column(*request.y);
        s.columns["x"] = *request.x;
        s.columns["y"] = *request.y;
      }
      break;
    case TestKind::signedrank:
      if (request.diff) {
        s.differences = table.numeric_column(*request.diff);
        s.columns["diff"] = *request.diff;
      } else if (request.test_value) {
        const Sample x = table.numeric_column(*request.x);
        for (double v : x) s.differences.push_back(v - *request.test_value);
        s.columns["x"] = *request.x;
        s.columns["test_value"] = *request.test_value;
      } else {
        const Sample x = table.numeric_column(*request.x);
        const Sample y = table.numeric_column(*request.y);
        for (std::size_t i = 0; i < x.size(); ++i) s.differences.push_back(y[i] - x[i]);
        s.columns["x"] = *request.x;
        s.columns["y"] = *request.y;
      }
      break;
    case TestKind::spearman:
      s.x = table.numeric_column(*request.x);
      s.y = table.numeric_column(*request.y);
      s.columns["x"] = *request.x;
      s.columns["y"] = *request.y;
      break;
  }
  return s;
}

// Evenly spaced points on [lo, hi] with the null value merged in.
std::vector<double> grid_values(double lo, double hi, std::size_t points) {
  std::vector<double> values(points);
  for (std::size_t i = 0; i < points; ++i) {
    values[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  if (std::find(values.begin(), values.end(), 0.0) == values.end()) {
    values.insert(std::upper_bound(values.begin(), values.end(), 0.0), 0.0);
  }
  return values;
}

std::vector<PlotRow> delta_grid(const std::vector<ChainOutput>& chains, const PriorSpec& prior,
                                std::size_t points) {
  std::vector<double> pooled;
  std::vector<double> sds;
  for (const auto& c : chains) {
    pooled.insert(pooled.end(), c.samples.begin(), c.samples.end());
    for (const auto& p : c.conditionals) sds.push_back(p.sd);
  }
  const double pad = 4.0 * quantile_type7(sds, 0.5);
  const double lo = quantile_type7(pooled, 0.0005) - pad;
  const double hi = quantile_type7(pooled, 0.9995) + pad;
  std::vector<PlotRow> rows;
  for (double v : grid_values(lo, hi, points)) {
    rows.push_back({v, cauchy_pdf(v, 0.0, prior.cauchy_scale), rao_blackwell_density(chains, v)});
  }
  return rows;
}

std::vector<PlotRow> rho_grid(const std::vector<ChainOutput>& chains, std::size_t points) {
  std::vector<double> pooled;
  for (const auto& c : chains) pooled.insert(pooled.end(), c.samples.begin(), c.samples.end());
  const ReflectedKde kde(std::move(pooled), -1.0, 1.0);
  std::vector<PlotRow> rows;
  for (double v : grid_values(-1.0, 1.0, points)) rows.push_back({v, 0.5, kde(v)});
  return rows;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

char parse_delimiter(const std::string& text) {
  if (text == "tab" || text == "\\t" || text == "\t") return '\t';
  if (text.size() != 1) throw ConfigurationError("delimiter must be a single character");
  return text.front();
}

}  // namespace

void TestRequest::validate() const {
  if (input.empty()) throw ConfigurationError("an input file is required");
  if (!std::isfinite(cauchy_scale) || !(cauchy_scale > 0.0)) {
    throw ConfigurationError("--scale must be a positive number");
  }
  if (grid_points < 2) throw ConfigurationError("--grid-points must be at least 2");
  if (config.iterations == 0 || config.chains == 0 || config.thin == 0) {
    throw ConfigurationError("iterations, chains and thin must be positive");
  }
  const bool xy = x && y;
  switch (test) {
    case TestKind::ranksum: {
      const bool vg = value && group;
      if (xy == vg || diff || test_value || (value && !group) || (group && !value) ||
          (x && !y) || (y && !x)) {
        throw ConfigurationError("ranksum needs either --x and --y, or --value and --group");
      }
      break;
    }
    case TestKind::signedrank: {
      const int modes = (xy && !test_value ? 1 : 0) + (diff ? 1 : 0) + (x && !y && test_value ? 1 : 0);
      if (modes != 1 || value || group || (y && !x) || (xy && test_value)) {
        throw ConfigurationError(
            "signedrank needs exactly one of --x and --y, --diff, or --x with --test-value");
      }
      break;
    }
    case TestKind::spearman:
      if (!xy || value || group || diff || test_value) {
        throw ConfigurationError("spearman needs --x and --y");
      }
      break;
  }
}

TestOutcome run_test(const TestRequest& request) {
  request.validate();
  const CsvTable table = read_csv_file(request.input, request.delimiter);
  const Selection data = select_columns(request, table);
  const auto start = std::chrono::steady_clock::now();

  const PriorSpec prior = request.test == TestKind::spearman ? PriorSpec::uniform_rho()
                                                             : PriorSpec::cauchy(request.cauchy_scale);
  const ChainConfig& config = request.config;

  Json observed;
  Json warnings = Json::array();
  std::vector<ChainOutput> chains;
  switch (request.test) {
    case TestKind::ranksum: {
      if (data.x.empty() || data.y.empty()) throw SampleTooSmall("both groups need observations");
      const UStatistic u = u_statistic(data.x, data.y);
      observed["n_x"] = data.x.size();
      observed["n_y"] = data.y.size();
      observed["U"] = u.u;
      observed["U_complement"] = u.u_complement;
      observed["rank_biserial"] = rank_biserial(data.x, data.y);
      chains = run_chains(
          [&](std::uint32_t id) { return ranksum_chain(data.x, data.y, prior, config, id); }, config);
      break;
    }
    case TestKind::signedrank: {
      const SignedRankResult w = signed_rank_w(data.differences, 0.0);
      observed["n"] = w.decomposition.size();
      observed["W"] = w.w;
      observed["matched_rank_biserial"] = matched_rank_biserial(w.decomposition);
      observed["dropped_zeros"] = w.decomposition.dropped_zeros;
      if (w.decomposition.dropped_zeros > 0) {
        warnings.push_back(std::to_string(w.decomposition.dropped_zeros) +
                           " zero difference(s) dropped");
      }
      chains = run_chains(
          [&](std::uint32_t id) { return signedrank_chain(data.differences, prior, config, id); },
          config);
      break;
    }
    case TestKind::spearman: {
      if (data.x.size() <= 3) throw SampleTooSmall("spearman needs at least 4 pairs");
      observed["n"] = data.x.size();
      observed["rho_s"] = spearman_rho(data.x, data.y);
      chains = run_chains(
          [&](std::uint32_t id) { return spearman_chain(data.x, data.y, prior, config, id); }, config);
      break;
    }
  }

  const bool is_rho = request.test == TestKind::spearman;
  const BayesFactorResult bf = is_rho ? savage_dickey_rho(chains) : savage_dickey_delta(chains, prior);
  const auto samples = chain_samples(chains);
  const PosteriorSummary summary = posterior_summary(samples);

  TestOutcome outcome;
  Json& result = outcome.result;
  result["schema_version"] = std::string(kSchemaVersion);
  result["test"] = std::string(to_string(request.test));
  result["columns"] = data.columns;
  result["observed"] = observed;
  result["bayes_factor"] = bf_json(bf);
  result["posterior"] = summary_json(is_rho ? "rho" : "delta", summary);

  Json diagnostics;
  diagnostics["ess"] = summary.ess;
  diagnostics["rhat"] = summary.rhat ? Json(*summary.rhat) : Json(nullptr);
  if (is_rho) {
    std::vector<std::vector<double>> rho_s = samples;
    for (auto& chain : rho_s) {
      for (double& v : chain) v = kruskal_rho_to_rhos(v);
    }
    result["posterior_rho_s"] = summary_json("rho_s", posterior_summary(rho_s));

    double acceptance = 0.0;
    for (const auto& c : chains) acceptance += c.acceptance_rate;
    acceptance /= static_cast<double>(chains.size());
    diagnostics["acceptance_rate"] = acceptance;
    if (acceptance < 0.1 || acceptance > 0.9) {
      warnings.push_back("rho acceptance rate outside (0.1, 0.9)");
    }
  }
  if (summary.rhat && *summary.rhat > kRhatWarning) warnings.push_back("split R-hat above 1.01");
  if (summary.ess < kEssWarning) warnings.push_back("effective sample size below 400");
  if (request.timing) {
    diagnostics["runtime_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  diagnostics["warnings"] = warnings;
  result["diagnostics"] = diagnostics;

  Json provenance;
  provenance["version"] = std::string(kVersion);
  provenance["seed"] = config.seed;
  provenance["iterations"] = config.iterations;
  provenance["burnin"] = config.burnin;
  provenance["chains"] = config.chains;
  provenance["thin"] = config.thin;
  provenance["scale_step_sd"] = config.scale_step_sd;
  provenance["prior"] = is_rho ? "uniform(-1, 1) on rho" : "cauchy(0, scale) on delta";
  if (!is_rho) provenance["cauchy_scale"] = prior.cauchy_scale;
  result["provenance"] = provenance;

  if (request.plot_grid) {
    outcome.grid = is_rho ? rho_grid(chains, request.grid_points)
                          : delta_grid(chains, prior, request.grid_points);
  }
  return outcome;
}

void write_plot_grid(std::ostream& out, const std::vector<PlotRow>& grid) {
  out << "value,prior_density,posterior_density\n";
  for (const PlotRow& row : grid) {
    out << format_double(row.value) << ',' << format_double(row.prior_density) << ','
        << format_double(row.posterior_density) << '\n';
  }
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const InputError*>(&error)) return kExitMissingFile;
  if (dynamic_cast<const InvalidData*>(&error) || dynamic_cast<const ConfigurationError*>(&error) ||
      dynamic_cast<const CLI::Error*>(&error)) {
    return kExitBadInput;
  }
  return kExitSamplerError;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian rank-based tests with latent normal data augmentation"};
  app.set_version_flag("--version", std::string(kVersion));

  TestRequest request;
  std::string test_name;
  std::string delimiter = ",";
  std::optional<std::string> output;
  app.add_option("--test", test_name, "ranksum, signedrank or spearman");
  app.add_option("--input", request.input, "Headered CSV file");
  app.add_option("--x", request.x, "Column with x (or the paired first measurement)");
  app.add_option("--y", request.y, "Column with y (or the paired second measurement)");
  app.add_option("--value", request.value, "Value column for value+group input");
  app.add_option("--group", request.group, "Two-level group column; the first level sorted is x");
  app.add_option("--diff", request.diff, "Column of difference scores");
  app.add_option("--test-value", request.test_value, "One-sample location to test against");
  app.add_option("--scale", request.cauchy_scale, "Cauchy prior scale")->capture_default_str();
  app.add_option("--iterations", request.config.iterations, "Retained draws per chain")->capture_default_str();
  app.add_option("--burnin", request.config.burnin, "Warm-up steps per chain")->capture_default_str();
  app.add_option("--chains", request.config.chains, "Number of chains")->capture_default_str();
  app.add_option("--thin", request.config.thin, "Keep every thin-th step")->capture_default_str();
  app.add_option("--seed", request.config.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", request.config.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--plot-grid", request.plot_grid, "Write the prior/posterior density grid CSV here");
  app.add_option("--grid-points", request.grid_points, "Plot grid resolution")->capture_default_str();
  app.add_option("--delimiter", delimiter, "Input field delimiter (a character or 'tab')")->capture_default_str();
  app.add_option("--output", output, "Write the result here instead of standard output");
  app.add_flag("--timing", request.timing, "Report wall-clock runtimes");

  SimulationGridSpec grid;
  std::string sim_test = "ranksum";
  std::string family = "logistic";
  std::string scenario = "same-shape";
  std::string copula = "clayton";
  std::vector<double> effects;
  std::vector<std::size_t> n_values{10, 20, 50};
  PriorSpec sim_prior;
  ChainConfig sim_config;
  bool no_comparator = false;
  std::optional<std::string> sim_output;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a simulation grid and write a CSV table");
  simulate->add_option("--test", sim_test, "ranksum, signedrank or spearman")->capture_default_str();
  simulate->add_option("--family", family, "normal, skew-normal, cauchy, logistic or uniform")->capture_default_str();
  simulate->add_option("--shape", grid.distribution.shape, "Skew-normal shape")->capture_default_str();
  simulate->add_option("--scenario", scenario, "same-shape or normal-vs-other")->capture_default_str();
  simulate->add_option("--copula", copula, "gaussian, clayton, frank or gumbel (spearman)")->capture_default_str();
  simulate->add_option("--effects", effects, "Effect values (shift or target rho_s)")->delimiter(',');
  simulate->add_option("--n", n_values, "Sample sizes")->delimiter(',');
  simulate->add_option("--replicates", grid.replicates, "Replicates per cell")->capture_default_str();
  simulate->add_option("--seed", grid.seed, "Random seed")->capture_default_str();
  simulate->add_option("--scale", sim_prior.cauchy_scale, "Cauchy prior scale")->capture_default_str();
  simulate->add_option("--iterations", sim_config.iterations, "Retained draws per chain")->capture_default_str();
  simulate->add_option("--burnin", sim_config.burnin, "Warm-up steps per chain")->capture_default_str();
  simulate->add_option("--chains", sim_config.chains, "Number of chains")->capture_default_str();
  simulate->add_option("--thin", sim_config.thin, "Keep every thin-th step")->capture_default_str();
  simulate->add_option("--threads", sim_config.threads, "Worker threads (0 = all cores)")->capture_default_str();
  simulate->add_flag("--no-comparator", no_comparator, "Skip the default t-test Bayes factor");
  simulate->add_flag("--timing", grid.timing, "Fill the runtime_seconds column");
  simulate->add_option("--output", sim_output, "Write the CSV here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitBadInput;
  }

  try {
    if (simulate->parsed()) {
      const TestKind test = parse_test(sim_test);
      grid.scenario = parse_scenario(scenario);
      grid.distribution.family = parse_family(family);
      grid.copula = parse_copula(copula);
      grid.comparator = !no_comparator;
      grid.n_values = n_values;
      if (!effects.empty()) {
        grid.effect_values = effects;
      } else if (test == TestKind::spearman) {
        grid.effect_values = {0.0, 0.3, 0.8};
      }
      if (!std::isfinite(sim_prior.cauchy_scale) || !(sim_prior.cauchy_scale > 0.0)) {
        throw ConfigurationError("--scale must be a positive number");
      }
      if (sim_config.iterations == 0 || sim_config.chains == 0 || sim_config.thin == 0) {
        throw ConfigurationError("iterations, chains and thin must be positive");
      }
      grid.validate(test);
      sim_config.seed = grid.seed;
      const PriorSpec prior =
          test == TestKind::spearman ? PriorSpec::uniform_rho() : PriorSpec::cauchy(sim_prior.cauchy_scale);
      const auto rows = run_grid(grid, test, prior, sim_config);
      if (sim_output) {
        std::ofstream file(*sim_output, std::ios::binary);
        if (!file) throw InputError("cannot write '" + *sim_output + "'");
        write_grid_csv(file, rows);
      } else {
        write_grid_csv(out, rows);
      }
      return kExitOk;
    }

    if (test_name.empty()) throw ConfigurationError("--test is required");
    request.test = parse_test(test_name);
    request.delimiter = parse_delimiter(delimiter);
    const TestOutcome outcome = run_test(request);
    const std::string document = outcome.result.dump(2) + "\n";
    if (output) {
      std::ofstream file(*output, std::ios::binary);
      if (!file) throw InputError("cannot write '" + *output + "'");
      file << document;
    } else {
      out << document;
    }
    if (request.plot_grid) {
      std::ofstream file(*request.plot_grid, std::ios::binary);
      if (!file) throw InputError("cannot write '" + *request.plot_grid + "'");
      write_plot_grid(file, outcome.grid);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace latentrank

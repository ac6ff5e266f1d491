#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "latentrank/app.hpp"
#include "latentrank/errors.hpp"
#include "latentrank/inference.hpp"
#include "latentrank/ranks.hpp"
#include "latentrank/samplers.hpp"

namespace py = pybind11;
using namespace latentrank;

namespace {

ChainConfig make_config(std::uint32_t iterations, std::uint32_t burnin, std::uint32_t chains,
                        std::uint32_t thin, std::uint64_t seed, unsigned threads) {
  ChainConfig config;
  config.iterations = iterations;
  config.burnin = burnin;
  config.chains = chains;
  config.thin = thin;
  config.seed = seed;
  config.threads = threads;
  config.validate();
  return config;
}

py::dict summarize(const std::vector<ChainOutput>& chains, const BayesFactorResult& bf) {
  std::vector<std::vector<double>> sets;
  for (const auto& c : chains) sets.push_back(c.samples);
  const PosteriorSummary s = posterior_summary(sets);
  py::dict out;
  out["bf10"] = bf.bf10;
  out["bf01"] = bf.bf01;
  out["median"] = s.median;
  out["ci"] = py::make_tuple(s.ci_lower, s.ci_upper);
  out["ess"] = s.ess;
  out["rhat"] = s.rhat ? py::cast(*s.rhat) : py::none();
  out["samples"] = sets;
  return out;
}

template <typename Chain>
std::vector<ChainOutput> run(const ChainConfig& config, Chain chain) {
  py::gil_scoped_release release;
  return run_chains(chain, config);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian rank-based tests with latent normal data augmentation";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<Error>(m, "LatentRankError", PyExc_ValueError);

  m.def("midranks", [](const std::vector<double>& v) {
    const RankVector r = midranks(v);
    return std::vector<double>(r.values().begin(), r.values().end());
  });
  m.def(
      "rank_biserial",
      [](const std::vector<double>& x, const std::vector<double>& y) { return rank_biserial(x, y); },
      py::arg("x"), py::arg("y"));
  m.def(
      "matched_rank_biserial",
      [](const std::vector<double>& d) { return matched_rank_biserial(decompose_differences(d)); },
      py::arg("differences"));
  m.def(
      "spearman_rho",
      [](const std::vector<double>& x, const std::vector<double>& y) { return spearman_rho(x, y); },
      py::arg("x"), py::arg("y"));
  m.def("kruskal_rho_to_rhos", &kruskal_rho_to_rhos);
  m.def("kruskal_rhos_to_rho", &kruskal_rhos_to_rho);
  m.def(
      "ttest_log_bf10",
      [](const std::vector<double>& x, const std::vector<double>& y, double scale) {
        return jzs_ttest_log_bf10(x, y, scale);
      },
      py::arg("x"), py::arg("y"), py::arg("scale") = 1.0 / std::numbers::sqrt2);

  m.def(
      "ranksum",
      [](const std::vector<double>& x, const std::vector<double>& y, double scale, std::uint32_t iterations,
         std::uint32_t burnin, std::uint32_t chains, std::uint32_t thin, std::uint64_t seed, unsigned threads) {
        const PriorSpec prior = PriorSpec::cauchy(scale);
        prior.validate();
        const ChainConfig config = make_config(iterations, burnin, chains, thin, seed, threads);
        const auto out =
            run(config, [&](std::uint32_t id) { return ranksum_chain(x, y, prior, config, id); });
        return summarize(out, savage_dickey_delta(out, prior));
      },
      py::arg("x"), py::arg("y"), py::arg("scale") = 1.0 / std::numbers::sqrt2, py::arg("iterations") = 5000,
      py::arg("burnin") = 1000, py::arg("chains") = 4, py::arg("thin") = 1, py::arg("seed") = 1,
      py::arg("threads") = 0);

  m.def(
      "signedrank",
      [](const std::vector<double>& differences, double scale, std::uint32_t iterations, std::uint32_t burnin,
         std::uint32_t chains, std::uint32_t thin, std::uint64_t seed, unsigned threads) {
        const PriorSpec prior = PriorSpec::cauchy(scale);
        prior.validate();
        const ChainConfig config = make_config(iterations, burnin, chains, thin, seed, threads);
        const auto out =
            run(config, [&](std::uint32_t id) { return signedrank_chain(differences, prior, config, id); });
        return summarize(out, savage_dickey_delta(out, prior));
      },
      py::arg("differences"), py::arg("scale") = 1.0 / std::numbers::sqrt2, py::arg("iterations") = 5000,
      py::arg("burnin") = 1000, py::arg("chains") = 4, py::arg("thin") = 1, py::arg("seed") = 1,
      py::arg("threads") = 0);

  m.def(
      "spearman",
      [](const std::vector<double>& x, const std::vector<double>& y, std::uint32_t iterations,
         std::uint32_t burnin, std::uint32_t chains, std::uint32_t thin, std::uint64_t seed, unsigned threads) {
        const PriorSpec prior = PriorSpec::uniform_rho();
        const ChainConfig config = make_config(iterations, burnin, chains, thin, seed, threads);
        const auto out =
            run(config, [&](std::uint32_t id) { return spearman_chain(x, y, prior, config, id); });
        return summarize(out, savage_dickey_rho(out));
      },
      py::arg("x"), py::arg("y"), py::arg("iterations") = 5000, py::arg("burnin") = 1000,
      py::arg("chains") = 4, py::arg("thin") = 1, py::arg("seed") = 1, py::arg("threads") = 0);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"latentrank"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line interface in process; returns (exit_code, stdout, stderr).");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "latentrank/app.hpp"
#include "latentrank/csv.hpp"
#include "latentrank/errors.hpp"

using namespace latentrank;
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "latentrank");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("latentrank_cli_" + std::to_string(::getpid()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

const std::string kTwoGroups =
    "score,cond\n3.1,a\n2.4,a\n4.0,a\n1.8,a\n2.9,a\n3.6,a\n"
    "4.4,b\n5.2,b\n3.9,b\n6.1,b\n4.8,b\n5.5,b\n";

const std::string kPaired = "pre,post\n1,2.5\n2,2.1\n3,4.4\n4,6.0\n5,4.7\n6,8.1\n7,7.0\n8,9.9\n";

std::vector<std::string> fast() {
  return {"--iterations", "2000", "--burnin", "200", "--chains", "2", "--threads", "1"};
}

std::vector<std::string> join(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("CSV parsing") {
  std::istringstream in("\xEF\xBB\xBF" "a,\"b,c\"\r\n1,\"x \"\"q\"\"\"\r\n\r\n2,y\n");
  const CsvTable t = parse_csv(in, ',');
  REQUIRE(t.header().size() == 2);
  CHECK(t.header()[1] == "b,c");
  CHECK(t.rows() == 2);
  CHECK(t.text_column("b,c")[0] == "x \"q\"");
  CHECK(t.numeric_column("a") == std::vector<double>{1.0, 2.0});

  std::istringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(parse_csv(ragged, ','), InvalidData);
  std::istringstream dup("a,a\n1,2\n");
  CHECK_THROWS_AS(parse_csv(dup, ','), InvalidData);

  std::istringstream bad("a,b\n1,2\n3,oops\n");
  const CsvTable b = parse_csv(bad, ',');
  try {
    b.numeric_column("b");
    FAIL("expected an error");
  } catch (const InvalidData& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(b.column_index("zzz"), InvalidData);
  CHECK_THROWS_AS(read_csv_file("/nonexistent/file.csv", ','), InputError);
}

TEST_CASE("exit codes") {
  TempDir dir;
  const std::string groups = dir.file("g.csv", kTwoGroups);
  CHECK(cli({"--test", "ranksum", "--input", dir.path("missing.csv"), "--value", "score", "--group", "cond"}).code == 2);
  CHECK(cli({"--test", "ranksum", "--input", groups, "--value", "nope", "--group", "cond"}).code == 3);
  CHECK(cli({"--test", "bogus", "--input", groups}).code == 3);
  CHECK(cli({"--unknown-flag"}).code == 3);
  CHECK(cli({"--test", "ranksum", "--input", groups, "--value", "score"}).code == 3);
  CHECK(cli({"--test", "ranksum", "--input", groups, "--value", "score", "--group", "cond", "--iterations", "0"}).code == 3);

  const std::string text = dir.file("t.csv", "x,y\n1,2\n2,abc\n3,4\n4,5\n");
  const Run bad = cli({"--test", "spearman", "--input", text, "--x", "x", "--y", "y"});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("line 3") != std::string::npos);

  const std::string zeros = dir.file("z.csv", "d\n0\n0\n0\n");
  CHECK(cli(join({"--test", "signedrank", "--input", zeros, "--diff", "d"}, fast())).code == 4);
  const std::string tiny = dir.file("s.csv", "x,y\n1,2\n2,1\n3,3\n");
  CHECK(cli(join({"--test", "spearman", "--input", tiny, "--x", "x", "--y", "y"}, fast())).code == 4);

  CHECK(exit_code_for(InputError("x")) == 2);
  CHECK(exit_code_for(InvalidData("x")) == 3);
  CHECK(exit_code_for(ConfigurationError("x")) == 3);
  CHECK(exit_code_for(InsufficientSamples("x")) == 4);
}

TEST_CASE("result document") {
  TempDir dir;
  const std::string groups = dir.file("g.csv", kTwoGroups);
  const Run run = cli(join({"--test", "ranksum", "--input", groups, "--value", "score", "--group", "cond"}, fast()));
  REQUIRE(run.code == 0);
  const Json j = Json::parse(run.out);
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  CHECK(keys == std::vector<std::string>{"schema_version", "test", "columns", "observed", "bayes_factor",
                                         "posterior", "diagnostics", "provenance"});
  CHECK(j["schema_version"] == "1.0");
  CHECK(j["columns"]["x_level"] == "a");
  CHECK(j["observed"]["n_x"] == 6);
  CHECK(j["observed"]["rank_biserial"].get<double>() < -0.5);
  const auto& bf = j["bayes_factor"];
  CHECK(bf["bf10"].get<double>() * bf["bf01"].get<double>() == doctest::Approx(1.0));
  CHECK(bf["prior_ordinate"].get<double>() == doctest::Approx(std::numbers::sqrt2 / std::numbers::pi));
  CHECK(bf["method"] == "rao-blackwell");
  CHECK(j["posterior"]["median"].get<double>() > 0.0);
  CHECK(j["diagnostics"]["rhat"].is_number());
  CHECK_FALSE(j["diagnostics"].contains("runtime_seconds"));
  CHECK(j["provenance"]["seed"] == 1);
  CHECK(j["provenance"]["iterations"] == 2000);
  CHECK(run.out.find(groups) == std::string::npos);

  const Run again = cli(join({"--test", "ranksum", "--input", groups, "--value", "score", "--group", "cond"}, fast()));
  CHECK(again.out == run.out);

  const Run timed = cli(join({"--test", "ranksum", "--input", groups, "--value", "score", "--group", "cond", "--timing"}, fast()));
  CHECK(Json::parse(timed.out)["diagnostics"].contains("runtime_seconds"));
}

TEST_CASE("signed rank input forms agree") {
  TempDir dir;
  const std::string paired = dir.file("p.csv", kPaired);
  const Run xy = cli(join({"--test", "signedrank", "--input", paired, "--x", "pre", "--y", "post"}, fast()));
  REQUIRE(xy.code == 0);
  std::string diffs = "d\n";
  for (double d : {1.5, 0.1, 1.4, 2.0, -0.3, 2.1, 0.0, 1.9}) diffs += std::to_string(d) + "\n";
  const Run diff = cli(join({"--test", "signedrank", "--input", dir.file("d.csv", diffs), "--diff", "d"}, fast()));
  REQUIRE(diff.code == 0);
  const Json a = Json::parse(xy.out);
  const Json b = Json::parse(diff.out);
  CHECK(a["posterior"] == b["posterior"]);
  CHECK(a["observed"]["dropped_zeros"] == 1);
  CHECK(a["diagnostics"]["warnings"].size() == 1);
  const Run one = cli(join({"--test", "signedrank", "--input", paired, "--x", "post", "--test-value", "5"}, fast()));
  CHECK(one.code == 0);
}

TEST_CASE("spearman output") {
  TempDir dir;
  const std::string paired = dir.file("p.csv", kPaired);
  const Run run = cli(join({"--test", "spearman", "--input", paired, "--x", "pre", "--y", "post", "--delimiter", ","}, fast()));
  REQUIRE(run.code == 0);
  const Json j = Json::parse(run.out);
  CHECK(j.contains("posterior_rho_s"));
  CHECK(j["bayes_factor"]["method"] == "kde");
  CHECK(j["bayes_factor"]["prior_ordinate"] == 0.5);
  CHECK(j["diagnostics"]["acceptance_rate"].get<double>() > 0.0);
  CHECK_FALSE(j["provenance"].contains("cauchy_scale"));
}

TEST_CASE("density grid") {
  TempDir dir;
  const std::string groups = dir.file("g.csv", kTwoGroups);
  const std::string grid_path = dir.path("grid.csv");
  const Run run = cli(join({"--test", "ranksum", "--input", groups, "--value", "score", "--group", "cond",
                            "--plot-grid", grid_path, "--grid-points", "400"},
                           fast()));
  REQUIRE(run.code == 0);
  const Json j = Json::parse(run.out);
  const CsvTable t = read_csv_file(grid_path, ',');
  CHECK(t.header() == std::vector<std::string>{"value", "prior_density", "posterior_density"});
  const auto v = t.numeric_column("value");
  const auto prior = t.numeric_column("prior_density");
  const auto post = t.numeric_column("posterior_density");
  double integral = 0.0;
  bool found_null = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) integral += 0.5 * (post[i] + post[i - 1]) * (v[i] - v[i - 1]);
    if (v[i] == 0.0) {
      found_null = true;
      CHECK(prior[i] == doctest::Approx(std::numbers::sqrt2 / std::numbers::pi).epsilon(1e-14));
      CHECK(post[i] / prior[i] == doctest::Approx(j["bayes_factor"]["bf01"].get<double>()).epsilon(1e-6));
    }
  }
  CHECK(found_null);
  CHECK(integral == doctest::Approx(1.0).epsilon(0.01));

  const std::string paired = dir.file("p.csv", kPaired);
  const std::string rho_path = dir.path("rho.csv");
  REQUIRE(cli(join({"--test", "spearman", "--input", paired, "--x", "pre", "--y", "post", "--plot-grid", rho_path}, fast())).code == 0);
  const CsvTable r = read_csv_file(rho_path, ',');
  for (double p : r.numeric_column("prior_density")) CHECK(p == 0.5);
  const auto rv = r.numeric_column("value");
  CHECK(rv.front() == -1.0);
  CHECK(rv.back() == 1.0);
}

TEST_CASE("simulate subcommand") {
  const std::vector<std::string> args{"simulate", "--test", "ranksum", "--effects", "0.5", "--n", "10",
                                      "--replicates", "1", "--iterations", "500", "--burnin", "100",
                                      "--chains", "2", "--threads", "1"};
  const Run a = cli(args);
  REQUIRE(a.code == 0);
  std::istringstream lines(a.out);
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  REQUIRE(all.size() == 2);
  CHECK(all[0] == kGridCsvHeader);
  CHECK(all[1].rfind("ranksum,logistic,same-shape,10,0.5,0,", 0) == 0);
  CHECK(cli(args).out == a.out);

  CHECK(cli({"simulate", "--test", "spearman", "--n", "3", "--replicates", "1"}).code == 3);
  CHECK(cli({"simulate", "--family", "weibull"}).code == 3);
}

TEST_CASE("installed executable") {
  TempDir dir;
  const std::string groups = dir.file("g.csv", kTwoGroups);
  const std::string out = dir.path("out.json");
  const std::string base = std::string(LATENTRANK_CLI_PATH) + " --test ranksum --value score --group cond "
                           "--iterations 500 --burnin 50 --chains 2 --threads 1";
  int status = std::system((base + " --input " + groups + " --output " + out).c_str());
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(Json::parse(std::ifstream(out))["test"] == "ranksum");
  status = std::system((base + " --input " + dir.path("none.csv") + " 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(status) == 2);
}

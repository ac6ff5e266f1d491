#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "latentrank/distributions.hpp"
#include "latentrank/errors.hpp"
#include "latentrank/rng.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace latentrank;
using testing_support::ks_critical;
using testing_support::ks_distance;

namespace {

// PCG XSL-RR 128/64 on pairs of 64-bit limbs, without the compiler's 128-bit
// type, seeded by the same rule as RngStream.
struct LimbPcg {
  std::uint64_t hi = 0, lo = 0;
  std::uint64_t inc_hi = 0, inc_lo = 0;

  static void mul(std::uint64_t ah, std::uint64_t al, std::uint64_t bh, std::uint64_t bl,
                  std::uint64_t& rh, std::uint64_t& rl) {
    const std::uint64_t a0 = al & 0xFFFFFFFFULL, a1 = al >> 32;
    const std::uint64_t b0 = bl & 0xFFFFFFFFULL, b1 = bl >> 32;
    const std::uint64_t p00 = a0 * b0, p01 = a0 * b1, p10 = a1 * b0, p11 = a1 * b1;
    const std::uint64_t mid = (p00 >> 32) + (p01 & 0xFFFFFFFFULL) + (p10 & 0xFFFFFFFFULL);
    rl = (mid << 32) | (p00 & 0xFFFFFFFFULL);
    rh = p11 + (p01 >> 32) + (p10 >> 32) + (mid >> 32) + ah * bl + al * bh;
  }
  void step() {
    std::uint64_t h, l;
    mul(hi, lo, 0x2360ED051FC65DA4ULL, 0x4385DF649FCCF645ULL, h, l);
    lo = l + inc_lo;
    hi = h + inc_hi + (lo < l ? 1 : 0);
  }
  LimbPcg(std::uint64_t seed, std::uint32_t id) {
    std::uint64_t s = id ^ 0x6A09E667F3BCC909ULL;
    const std::uint64_t mix = splitmix64(s);
    inc_hi = (mix << 1) | (static_cast<std::uint64_t>(id) >> 63);
    inc_lo = (static_cast<std::uint64_t>(id) << 1) | 1ULL;
    std::uint64_t ss = seed ^ mix;
    const std::uint64_t sh = splitmix64(ss);
    const std::uint64_t sl = splitmix64(ss);
    step();
    const std::uint64_t old = lo;
    lo += sl;
    hi += sh + (lo < old ? 1 : 0);
    step();
  }
  std::uint64_t next() {
    step();
    const std::uint64_t x = hi ^ lo;
    const unsigned rot = static_cast<unsigned>(hi >> 58);
    return (x >> rot) | (x << ((64U - rot) & 63U));
  }
};

}  // namespace

TEST_CASE("stream matches an independent limb-arithmetic PCG") {
  for (std::uint32_t id : {0U, 1U, 7U, 0xFFFFFFFFU}) {
    RngStream stream(12345, id);
    LimbPcg oracle(12345, id);
    for (int i = 0; i < 1000; ++i) REQUIRE(stream.next_u64() == oracle.next());
  }
}

TEST_CASE("identical seed and stream give identical sequences") {
  RngStream a(99, 3), b(99, 3);
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("distinct streams differ and are uncorrelated") {
  RngStream a(99, 0), b(99, 1);
  const int n = 100000;
  double sab = 0.0;
  int equal = 0;
  for (int i = 0; i < n; ++i) {
    const double u = a.uniform() - 0.5;
    const double v = b.uniform() - 0.5;
    sab += u * v;
    equal += u == v;
  }
  CHECK(equal == 0);
  const double corr = sab / n * 12.0;
  CHECK(std::fabs(corr) < 4.0 / std::sqrt(n));
}

TEST_CASE("uniform draws respect their ranges") {
  RngStream s(1, 0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    const double o = s.uniform_open();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(o > 0.0);
    REQUIRE(o < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("derive_seed separates replicate indices") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 30; ++a)
    for (std::uint64_t b = 0; b < 30; ++b) seen.insert(derive_seed(7, a, b));
  CHECK(seen.size() == 900);
  CHECK(derive_seed(7, 1, 2) == derive_seed(7, 1, 2));
  CHECK(derive_seed(7, 1, 2) != derive_seed(7, 2, 1));
}

TEST_CASE("normal cdf agrees with a 50-digit erfc") {
  using big = boost::multiprecision::cpp_bin_float_50;
  for (double x = -37.5; x <= 8.5; x += 0.25) {
    const big exact = boost::math::erfc(-big(x) / boost::multiprecision::sqrt(big(2))) / 2;
    const double e = exact.convert_to<double>();
    CHECK(normal_cdf(x) == doctest::Approx(e).epsilon(2e-15));
  }
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.0, 1.0, 3.0) == 0.5);
  CHECK(normal_ccdf(37.0) > 0.0);
  CHECK(normal_ccdf(2.0) == doctest::Approx(normal_cdf(-2.0)).epsilon(1e-15));
}

TEST_CASE("normal pdf and logpdf") {
  CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-15));
  CHECK(normal_logpdf(1.5, 0.5, 2.0) ==
        doctest::Approx(std::log(normal_pdf(1.5, 0.5, 2.0))).epsilon(1e-14));
  CHECK_THROWS_AS(normal_pdf(0.0, 0.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(normal_cdf(0.0, 0.0, -1.0), InvalidParameter);
  CHECK(cauchy_pdf(0.0, 0.0, 1.0 / std::sqrt(2.0)) == doctest::Approx(std::sqrt(2.0) / M_PI));
}

TEST_CASE("normal quantile agrees with boost and inverts the cdf") {
  const boost::math::normal_distribution<double> ref;
  for (double p : {1e-300, 1e-100, 1e-20, 1e-10, 1e-5, 0.001, 0.025, 0.1, 0.3, 0.5, 0.7, 0.9,
                   0.975, 0.999, 1.0 - 1e-10}) {
    CHECK(normal_quantile(p) == doctest::Approx(boost::math::quantile(ref, p)).epsilon(1e-14));
  }
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975, 1.0, 2.0) == doctest::Approx(1.0 + 2.0 * 1.959963984540054));
  CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(std::nan("")), DomainError);
}

TEST_CASE("truncation interval validation") {
  CHECK_THROWS_AS(TruncationInterval(1.0, 1.0), InvalidInterval);
  CHECK_THROWS_AS(TruncationInterval(2.0, 1.0), InvalidInterval);
  CHECK_THROWS_AS(TruncationInterval(std::nan(""), 1.0), InvalidInterval);
  const auto all = TruncationInterval::unbounded();
  CHECK(all.contains(1e300));
  CHECK_FALSE(TruncationInterval(0.0, 1.0).contains(0.0));
}

TEST_CASE("normal sampler passes KS against the cdf") {
  RngStream s(5, 0);
  std::vector<double> draws(100000);
  for (double& d : draws) d = normal_sample(s, 0.0, 1.0);
  CHECK(ks_distance(draws, testing_support::phi_cdf) < ks_critical(draws.size()));
}

TEST_CASE("truncated normal matches quadrature moments on 20 intervals") {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<std::pair<double, double>> intervals = {
      {10.0, 11.0}, {-11.0, -10.0}, {-inf, inf}, {0.0, inf},   {-inf, 0.0},
      {-1.0, 1.0},  {0.5, 0.51},    {2.0, inf},  {5.0, inf},   {-inf, -5.0},
      {0.2, 3.0},   {1.0, 1.5},     {-3.0, 0.1}, {-0.1, 0.05}, {3.0, 3.2},
      {-2.5, -2.0}, {0.0, 0.3},     {-inf, 1.5}, {25.0, inf},  {-4.0, 4.0}};
  RngStream s(2024, 0);
  const int n = 20000;
  for (const auto& [a, b] : intervals) {
    const TruncationInterval iv(a, b);
    std::vector<double> draws(n);
    for (double& d : draws) {
      d = truncated_normal_sample(s, 0.0, 1.0, iv);
      REQUIRE(iv.contains(d));
    }
    const auto [m, sd] = oracles::truncated_moments(a, b);
    const double se = sd / std::sqrt(static_cast<double>(n));
    INFO("interval (" << a << ", " << b << ")");
    CHECK(std::fabs(testing_support::mean(draws) - m) < 3.0 * se + 1e-12);
  }
}

TEST_CASE("truncated normal honours location and scale") {
  RngStream s(3, 0);
  const TruncationInterval iv(4.0, 6.0);
  for (int i = 0; i < 1000; ++i) {
    const double d = truncated_normal_sample(s, 5.0, 0.01, iv);
    REQUIRE(iv.contains(d));
  }
  const TruncationInterval far(100.0, 100.5);
  for (int i = 0; i < 1000; ++i) REQUIRE(far.contains(truncated_normal_sample(s, 0.0, 2.0, far)));
}

TEST_CASE("gamma and inverse gamma samplers pass KS") {
  RngStream s(11, 0);
  for (double shape : {0.3, 1.0, 2.5, 10.0}) {
    std::vector<double> draws(50000);
    for (double& d : draws) d = gamma_sample(s, shape, 2.0);
    const boost::math::gamma_distribution<double> ref(shape, 0.5);
    INFO("shape " << shape);
    CHECK(ks_distance(draws, [&](double x) { return boost::math::cdf(ref, x); }) <
          ks_critical(draws.size()));
  }
  std::vector<double> draws(50000);
  for (double& d : draws) d = inverse_gamma_sample(s, 1.0, 0.75);
  const boost::math::inverse_gamma_distribution<double> ref(1.0, 0.75);
  CHECK(ks_distance(draws, [&](double x) { return boost::math::cdf(ref, x); }) <
        ks_critical(draws.size()));
  CHECK_THROWS_AS(gamma_sample(s, 0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(inverse_gamma_sample(s, 1.0, -1.0), InvalidParameter);
}

TEST_CASE("exponential sampler mean") {
  RngStream s(12, 0);
  std::vector<double> draws(100000);
  for (double& d : draws) d = exponential_sample(s, 4.0);
  CHECK(std::fabs(testing_support::mean(draws) - 0.25) < 3.0 * 0.25 / std::sqrt(1e5));
}

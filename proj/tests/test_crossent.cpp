#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "lne/crossent.hpp"
#include "lne/entropy.hpp"
#include "lne/errors.hpp"

using lne::EntropyParams;
using lne::MassPolicy;
using lne::WeightVector;

namespace {

double ce(const WeightVector& p, const WeightVector& q, double a, double b,
          MassPolicy policy = MassPolicy::require_equal) {
  return lne::log_norm_cross_entropy(p, q, EntropyParams(a, b), policy).value;
}

WeightVector random_probability(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(n);
  for (double& v : w) v = ex(rng) + 1e-3;
  return WeightVector(std::move(w)).normalized();
}

// (1/(a-1)) ln sum p^a q^(1-a), coded without the library
double renyi_divergence(const WeightVector& p, const WeightVector& q, double a) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::pow(p[i], a) * std::pow(q[i], 1.0 - a);
  return std::log(s) / (a - 1.0);
}

}  // namespace

TEST_CASE("worked values") {
  CHECK(std::abs(ce({0.5, 0.5}, {0.5, 0.5}, 2.0, 1.0)) < 1e-15);
  // off beta = 1 the self cross-entropy is -beta ln||P||_beta, not 0
  CHECK(ce({0.5, 0.5}, {0.5, 0.5}, 0.7, 3.0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(ce({0.5, 0.5}, {0.75, 0.25}, 2.0, 1.0) == doctest::Approx(0.28768207245178093).epsilon(1e-14));
  CHECK(ce({0.5, 0.5}, {0.75, 0.25}, 2.0, 1.0) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-14));
  const auto v = lne::log_norm_cross_entropy({0.5, 0.5}, {0.75, 0.25}, EntropyParams(2.0, 1.0));
  CHECK(v.prior_mass == doctest::Approx(1.0));
  CHECK(v.params.alpha() == 2.0);
}

TEST_CASE("uniform prior identity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> order(0.2, 4.0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 6;
    const WeightVector p = random_probability(rng, n);
    const WeightVector u(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    const double a = order(rng);
    const double b = t % 5 == 0 ? a : order(rng);
    const double lne = lne::log_norm_entropy(p, EntropyParams(a, b)).value;
    CHECK(std::abs(ce(p, u, a, b) - (b * std::log(static_cast<double>(n)) - lne)) <= 1e-10);
  }
}

TEST_CASE("first-argument scale invariance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> order(0.2, 4.0);
  for (int t = 0; t < 100; ++t) {
    const WeightVector p = random_probability(rng, 4);
    const WeightVector q = random_probability(rng, 4);
    const double a = order(rng);
    const double b = order(rng);
    const double base = ce(p, q, a, b);
    for (double c : {1e-3, 0.5, 1.0}) {
      CHECK(std::abs(ce(p.scaled(c), q, a, b, MassPolicy::ignore) - base) <= 1e-9 * (1.0 + std::abs(base)));
    }
  }
}

TEST_CASE("beta = 1 reduces to the renyi divergence") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> order(0.1, 6.0);
  for (int t = 0; t < 200; ++t) {
    const WeightVector p = random_probability(rng, 2 + t % 5);
    const WeightVector q = random_probability(rng, 2 + t % 5);
    const double a = order(rng);
    if (std::abs(a - 1.0) < 1e-3) continue;
    CHECK(std::abs(ce(p, q, a, 1.0) - renyi_divergence(p, q, a)) <= 1e-10);
  }
}

TEST_CASE("branch continuity across alpha = beta") {
  const WeightVector p{0.5, 0.3, 0.2};
  const WeightVector q{0.2, 0.3, 0.5};
  for (double b : {0.4, 1.0, 2.5}) {
    CHECK(std::abs(ce(p, q, b + 1e-6, b) - ce(p, q, b, b)) <= 1e-4);
    for (double d : {1e-8, 1e-7, 1e-6, 1e-5}) {
      // not symmetric in the orders, so the gap is first order in d
      CHECK(std::abs(ce(p, q, b + d, b) - ce(p, q, b, b)) <= 1e-6 + 10.0 * d);
    }
  }
}

TEST_CASE("input checks") {
  CHECK_THROWS_AS(ce({0.5, 0.5}, {1.0}, 2.0, 1.0), lne::InvalidArgument);
  CHECK_THROWS_AS(ce({0.5, 0.5}, {0.5, 0.25}, 2.0, 1.0), lne::MassMismatch);
  CHECK_NOTHROW(ce({0.5, 0.5}, {0.5, 0.25}, 2.0, 1.0, MassPolicy::ignore));

  // a zero prior under a negative exponent or a log ratio names the states
  for (auto [a, b] : {std::pair{2.0, 1.0}, {1.5, 1.5}}) {
    try {
      ce({0.2, 0.3, 0.5}, {0.0, 1.0, 0.0}, a, b);
      FAIL("expected DomainError");
    } catch (const lne::DomainError& e) {
      CHECK(e.states() == std::vector<std::size_t>{0, 2});
    }
  }
  // with beta > alpha the prior enters with a positive power
  CHECK(std::isfinite(ce({0.2, 0.3, 0.5}, {0.0, 0.5, 0.5}, 1.0, 2.0)));
  CHECK(ce({1.0, 0.0}, {0.0, 1.0}, 1.0, 2.0) == std::numeric_limits<double>::infinity());
  // p_i = 0 terms are dropped whatever q_i is
  CHECK(std::isfinite(ce({0.0, 1.0}, {0.5, 0.5}, 2.0, 1.0)));
}

TEST_CASE("relative entropy bridge") {
  CHECK(lne::relative_entropy_bridge({0.5, 0.5}, {0.75, 0.25}, EntropyParams(2.0, 1.0)) ==
        doctest::Approx(0.14384103622589046).epsilon(1e-14));
  const WeightVector q{0.6, 0.3, 0.1};
  const EntropyParams ab(2.0, 1.0);
  const double direct = ce(q, q, 2.0, 1.0);
  CHECK(lne::relative_entropy_bridge(q, q, ab) ==
        doctest::Approx((direct + lne::log_norm(q, 1.0)) / 2.0).epsilon(1e-14));
  CHECK(std::abs(lne::relative_entropy_bridge(q, q, EntropyParams(0.7, 2.6))) <= 1e-14);
  const WeightVector p{0.2, 0.2, 0.6};
  for (double c : {1e-3, 0.5, 3.0}) {
    CHECK(lne::relative_entropy_bridge(p.scaled(c), q, ab, MassPolicy::ignore) ==
          doctest::Approx(lne::relative_entropy_bridge(p, q, ab)).epsilon(1e-12));
  }
}

TEST_CASE("relative entropy is nonnegative on random draws") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> log_order(std::log(0.1), std::log(5.0));
  double worst = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const WeightVector p = random_probability(rng, 2 + t % 4);
    const WeightVector q = random_probability(rng, 2 + t % 4);
    const EntropyParams ab(std::exp(log_order(rng)), std::exp(log_order(rng)));
    worst = std::min(worst, lne::relative_entropy_bridge(p, q, ab));
  }
  CHECK(worst >= -1e-12);
}

TEST_CASE("convexity in P (diagnostic)") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int violations = 0;
  const int draws = 1000;
  for (int t = 0; t < draws; ++t) {
    const WeightVector p = random_probability(rng, 3);
    const WeightVector r = random_probability(rng, 3);
    const WeightVector q = random_probability(rng, 3);
    const double a = 0.2 + 4.0 * unit(rng);
    const double b = 0.2 + 4.0 * unit(rng);
    const double l = unit(rng);
    std::vector<double> mix(3);
    for (std::size_t i = 0; i < 3; ++i) mix[i] = l * p[i] + (1.0 - l) * r[i];
    const double lhs = ce(WeightVector(mix), q, a, b);
    if (lhs > l * ce(p, q, a, b) + (1.0 - l) * ce(r, q, a, b) + 1e-12) ++violations;
  }
  MESSAGE("midpoint convexity violations: " << violations << " of " << draws);
}

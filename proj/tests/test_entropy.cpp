#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lne/entropy.hpp"
#include "lne/errors.hpp"
#include "lne/qdeform.hpp"

using lne::EntropyParams;
using lne::WeightVector;

namespace {

const double kLn2 = std::log(2.0);

double lne_of(const WeightVector& p, double a, double b) { return lne::log_norm_entropy(p, EntropyParams(a, b)).value; }

WeightVector random_probability(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(n);
  for (double& v : w) v = ex(rng) + 1e-3;
  return WeightVector(std::move(w)).normalized();
}

}  // namespace

TEST_CASE("shannon") {
  CHECK(lne::shannon({1.0, 0.0}).value == 0.0);
  CHECK(lne::shannon({0.5, 0.5}).value == doctest::Approx(kLn2).epsilon(1e-15));
  // mass-normalized form on a sub-probability vector
  CHECK(lne::shannon({0.25, 0.25}).value == doctest::Approx(1.3862943611198906).epsilon(1e-15));
  CHECK(lne::shannon({0.25, 0.25}).family == lne::Family::shannon);
}

TEST_CASE("renyi") {
  CHECK(lne::renyi({0.25, 0.25, 0.25, 0.25}, 2.0).value == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(lne::renyi({0.75, 0.25}, 2.0).value == doctest::Approx(0.47000362924573555).epsilon(1e-14));
  CHECK(std::abs(lne::renyi({0.5, 0.5}, 1.0 + 1e-9).value - kLn2) <= 1e-6);
  CHECK(std::abs(lne::renyi({0.7, 0.3}, 1.0 + 1e-7).value - lne::shannon({0.7, 0.3}).value) <= 1e-6);
  CHECK_THROWS_AS(lne::renyi({0.5, 0.5}, 0.0), lne::InvalidArgument);
}

TEST_CASE("tsallis") {
  CHECK(lne::tsallis({1.0, 0.0}, 2.0).value == 0.0);
  CHECK(lne::tsallis({0.5, 0.5}, 2.0).value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(lne::tsallis({0.5, 0.5}, 1.0 + 1e-9).value - kLn2) <= 1e-6);
  CHECK(std::abs(lne::tsallis({0.5, 0.5}, 1.0 - 1e-9).value - kLn2) <= 1e-6);
  CHECK_THROWS_AS(lne::tsallis({0.25, 0.25}, 2.0), lne::InvalidArgument);

  const WeightVector p{0.5, 0.3, 0.15, 0.05};
  for (double q : {-0.5, 0.3, 0.99, 1.5, 2.0, 4.0}) {
    double cross = 0.0;
    for (double v : p) cross -= std::pow(v, q) * lne::q_log(v, lne::DeformationIndex(q));
    CHECK(std::abs(lne::tsallis(p, q).value - cross) <= 1e-10);
  }
}

TEST_CASE("kapur") {
  for (auto [a, b] : {std::pair{2.0, 1.0}, {0.5, 3.0}, {7.0, 0.2}}) {
    CHECK(lne::kapur({0.5, 0.5}, a, b).value == doctest::Approx(kLn2).epsilon(1e-14));
  }
  CHECK(std::abs(lne::kapur({0.75, 0.25}, 2.0, 1.0).value - lne::renyi({0.75, 0.25}, 2.0).value) <= 1e-10);
  CHECK(lne::kapur({0.9, 0.1}, 3.0, 2.0).value == doctest::Approx(std::log(0.82 / 0.73)).epsilon(1e-13));
  CHECK(lne::kapur({0.9, 0.1}, 3.0, 2.0).value == doctest::Approx(0.11625980611586198).epsilon(1e-13));
  CHECK_THROWS_AS(lne::kapur({0.9, 0.1}, 2.0, 2.0 + 1e-9), lne::InvalidArgument);
}

TEST_CASE("norm entropy") {
  CHECK(lne::norm_entropy({1.0, 0.0}, 2.0, 0.5).value == 0.0);
  CHECK(lne::norm_entropy({0.5, 0.5}, 2.0, 1.0).value == doctest::Approx(2.0 * (1.0 - std::sqrt(0.5))).epsilon(1e-14));
  CHECK(lne::norm_entropy({0.5, 0.5}, 2.0, 1.0).value == doctest::Approx(0.58578643762690495).epsilon(1e-14));
  const WeightVector p{0.6, 0.3, 0.1};
  CHECK(lne::norm_entropy(p, 2.0, 1.0).value == doctest::Approx(lne::norm_entropy(p, 1.0, 2.0).value).epsilon(1e-14));
  CHECK(lne::norm_entropy(WeightVector{0.3, 0.2, 0.1}, 3.0, 0.7).value >= 0.0);
  CHECK_THROWS_AS(lne::norm_entropy(p, 1.0, 1.0), lne::InvalidArgument);
}

TEST_CASE("aczel-daroczy") {
  for (double b : {0.3, 1.0, 4.0}) {
    CHECK(lne::aczel_daroczy({0.5, 0.5}, b).value == doctest::Approx(kLn2).epsilon(1e-15));
    CHECK(lne::aczel_daroczy({1.0, 0.0}, b).value == 0.0);
  }
  CHECK(lne::aczel_daroczy({0.8, 0.2}, 2.0).value == doctest::Approx(0.30469027843890920).epsilon(1e-14));
  const WeightVector p{0.6, 0.3, 0.1};
  CHECK(lne::aczel_daroczy(p, 1.0).value == doctest::Approx(lne::shannon(p).value).epsilon(1e-14));
  CHECK_THROWS_AS(lne::aczel_daroczy(p, 0.0), lne::InvalidArgument);
}

TEST_CASE("lne examples") {
  for (auto [a, b] : {std::pair{2.0, 0.5}, {1.0, 1.0}, {100.0, 0.1}, {3.0, 3.0}}) {
    CHECK(lne_of({0.5, 0.5}, a, b) == doctest::Approx(kLn2).epsilon(1e-14));
  }
  CHECK(lne_of({0.75, 0.25}, 2.0, 1.0) == doctest::Approx(0.47000362924573555).epsilon(1e-13));
  const WeightVector p{0.8, 0.2};
  CHECK(lne_of(p, 4.0, 2.0) == doctest::Approx(0.11735060321721236).epsilon(1e-13));
  CHECK(lne_of(p, 4.0, 2.0) == doctest::Approx(lne::renyi(lne::escort(p, 2.0), 2.0).value).epsilon(1e-13));
  CHECK(lne_of({1.0, 0.0, 0.0}, 3.0, 0.5) == 0.0);
  CHECK(lne_of({0.0, 0.4}, 2.0, 2.0) == 0.0);
  const auto v = lne::log_norm_entropy(p, EntropyParams(4.0, 2.0));
  CHECK(v.family == lne::Family::lne);
  CHECK(*v.alpha == 4.0);
  CHECK(*v.beta == 2.0);
}

TEST_CASE("lne min-entropy limit") {
  CHECK(lne::lne_min_entropy_limit({0.5, 0.5}, 1.0).value == doctest::Approx(kLn2).epsilon(1e-15));
  CHECK(lne::lne_min_entropy_limit({1.0, 0.0}, 3.0).value == 0.0);
  CHECK(lne::lne_min_entropy_limit({0.8, 0.2}, 1.0).value == doctest::Approx(0.22314355131420976).epsilon(1e-14));
}

TEST_CASE("family names round-trip") {
  for (auto f : {lne::Family::shannon, lne::Family::renyi, lne::Family::tsallis, lne::Family::kapur, lne::Family::norm,
                 lne::Family::aczel_daroczy, lne::Family::lne, lne::Family::min_entropy_scaled}) {
    CHECK(lne::parse_family(lne::to_string(f)) == f);
  }
  CHECK_FALSE(lne::parse_family("boltzmann").has_value());
}

TEST_CASE("lne properties on random vectors") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> order(0.1, 5.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 7;
    const WeightVector p = random_probability(rng, n);
    const double a = order(rng);
    const double b = order(rng);
    const double e = lne_of(p, a, b);

    CHECK(e >= 0.0);
    CHECK(e <= std::log(static_cast<double>(n)) + 1e-12);
    for (double c : {1e-6, 1e-3, 0.5, 1.0}) CHECK(std::abs(lne_of(p.scaled(c), a, b) - e) <= 1e-9 * (1.0 + e));
    CHECK(std::abs(lne_of(p, b, a) - e) <= 1e-12);
    CHECK(std::abs(lne::renyi(lne::escort(p, b), a / b).value - e) <= 1e-9);
    std::vector<double> padded(p.begin(), p.end());
    padded.push_back(0.0);
    CHECK(std::abs(lne_of(WeightVector(padded), a, b) - e) <= 1e-12);
    CHECK(std::abs(lne_of(p, a, 1.0) - lne::renyi(p, a).value) <= 1e-10);

    const WeightVector q = random_probability(rng, 2 + t % 3);
    CHECK(std::abs(lne_of(lne::product_compose(p, q), a, b) - e - lne_of(q, a, b)) <= 1e-9);
  }
}

TEST_CASE("escort identity near the diagonal") {
  const WeightVector p{0.55, 0.25, 0.15, 0.05};
  for (double b : {0.3, 1.0, 2.5}) {
    for (double r : {1.0 + 1e-7, 1.0 + 1e-4, 0.999, 1.01}) {
      CHECK(std::abs(lne_of(p, r * b, b) - lne::renyi(lne::escort(p, b), r).value) <= 1e-9);
    }
  }
}

TEST_CASE("branch continuity and transition band") {
  const WeightVector p{0.55, 0.25, 0.15, 0.05};
  for (double b : {0.2, 1.0, 3.0}) {
    CHECK(std::abs(lne_of(p, b + 1e-6, b) - lne_of(p, b, b)) <= 1e-4);
    // The value is symmetric in the orders, so the diagonal formula at the
    // midpoint matches the off-diagonal one to second order in the gap.
    for (double d : {1e-8, 1e-7, 1e-6, 1e-5}) {
      const double mid = b + d / 2.0;
      CHECK(std::abs(lne_of(p, b + d, b) - lne_of(p, mid, mid)) <= 1e-6);
    }
  }
}

TEST_CASE("extremes") {
  for (std::size_t n = 2; n <= 50; n += 6) {
    const WeightVector u(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    for (double a : {0.1, 1.0, 7.0}) {
      for (double b : {0.3, 1.0, 20.0}) {
        CHECK(std::abs(lne_of(u, a, b) - std::log(static_cast<double>(n))) <= 1e-12);
      }
    }
  }
  CHECK(lne_of({0.0, 0.0, 0.7, 0.0}, 2.0, 0.4) == 0.0);
}

TEST_CASE("order limits") {
  const WeightVector p{0.5, 0.3, 0.15, 0.05};
  for (double b : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(lne_of(p, 1e-6, b) - std::log(4.0)) <= 1e-4);
    CHECK(std::abs(lne_of(p, 1e4, b) - lne::lne_min_entropy_limit(p, b).value) <= 1e-3);
  }
}

TEST_CASE("baseline limits toward aczel-daroczy") {
  const WeightVector p{0.5, 0.3, 0.15, 0.05};
  const double eps = 1e-6;
  for (double b : {0.5, 1.0, 2.0, 3.0}) {
    const double ad = lne::aczel_daroczy(p, b).value;
    CHECK(std::abs(lne::kapur(p, b + eps, b).value - ad) <= 1e-4);
    // the norm entropy tends to ||P||_b (b AD_b + b ln||P||_b)
    const double nb = std::exp(lne::log_norm(p, b));
    CHECK(std::abs(lne::norm_entropy(p, b + eps, b).value - nb * lne_of(p, b, b)) <= 1e-4);
  }
  // with b = 1 on a probability vector ||P||_1 = 1 and the classical
  // relation norm/b^2 -> AD holds
  CHECK(std::abs(lne::norm_entropy(p, 1.0 + eps, 1.0).value - lne::aczel_daroczy(p, 1.0).value) <= 1e-4);
  // ... but not for other b
  CHECK(std::abs(lne::norm_entropy(p, 2.0 + eps, 2.0).value / 4.0 - lne::aczel_daroczy(p, 2.0).value) > 1e-2);
}

TEST_CASE("robin hood transfers on escorts never lower renyi") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const WeightVector p = random_probability(rng, 2 + t % 6);
    const double b = 0.2 + 3.0 * unit(rng);
    const double a = 0.2 + 3.0 * unit(rng);
    const WeightVector e = lne::escort(p, b);
    std::size_t hi = 0;
    std::size_t lo = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] > e[hi]) hi = i;
      if (e[i] < e[lo]) lo = i;
    }
    if (hi == lo) continue;
    const double amount = std::max(1e-300, unit(rng) * (e[hi] - e[lo]) / 2.0);
    const WeightVector moved = lne::robin_hood_transfer(e, hi, lo, amount);
    CHECK(lne::renyi(moved, a / b).value >= lne::renyi(e, a / b).value - 1e-12);
    // any preimage of the moved escort, e.g. its 1/b-th power
    std::vector<double> pre(moved.size());
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] = std::pow(moved[i], 1.0 / b);
    CHECK(lne_of(WeightVector(pre), a, b) >= lne_of(p, a, b) - 1e-12);
  }
}

TEST_CASE("branching identity fails (pinned counterexample)") {
  // E(p q, p(1-q), 1-p) against E(p, 1-p) + p^a E(q, 1-q) with p = q = 1/2, a = 1
  const double lhs = lne_of({0.5, 0.25, 0.25}, 2.0, 1.0);
  const double rhs = lne_of({0.5, 0.5}, 2.0, 1.0) + 0.5 * lne_of({0.5, 0.5}, 2.0, 1.0);
  CHECK(lhs == doctest::Approx(0.98082925301172624).epsilon(1e-13));
  CHECK(rhs == doctest::Approx(1.5 * kLn2).epsilon(1e-14));
  CHECK(std::abs(lhs - rhs) > 1e-3);
}

TEST_CASE("generalized-mean bound: worked cases") {
  {
    const WeightVector p{0.25, 0.25};
    const EntropyParams ab(1.0, 2.0);
    CHECK(lne::log_norm_entropy(lne::concat(p, p), ab).value == doctest::Approx(1.386294361119891).epsilon(1e-14));
    CHECK(lne::gm_subadditivity_rhs(p, p, ab) == doctest::Approx(0.6931471805599453).epsilon(1e-14));
  }
  {
    const WeightVector p{0.5};
    const EntropyParams ab(2.0, 1.0);
    CHECK(lne::log_norm_entropy(lne::concat(p, p), ab).value == doctest::Approx(kLn2).epsilon(1e-14));
    CHECK(std::abs(lne::gm_subadditivity_rhs(p, p, ab)) < 1e-15);
  }
  for (auto ab : {EntropyParams(2.0, 1.0), EntropyParams(1.0, 2.0)}) {
    const WeightVector p{0.3, 0.0};
    const WeightVector q{0.5, 0.0};
    CHECK(lne::log_norm_entropy(lne::concat(p, q), ab).value == doctest::Approx(0.6325225587435105).epsilon(1e-13));
    CHECK(std::abs(lne::gm_subadditivity_rhs(p, q, ab)) < 1e-15);
  }
  CHECK_THROWS_AS(lne::gm_subadditivity_rhs({0.3}, {0.3}, EntropyParams(1.5, 1.5)), lne::InvalidArgument);
  CHECK_THROWS_AS(lne::gm_subadditivity_rhs({0.6}, {0.5}, EntropyParams(1.5, 1.0)), lne::InvalidArgument);
}

TEST_CASE("generalized-mean bound: union never falls below the mean") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const double split = 0.05 + 0.9 * unit(rng);
    const double total = 0.2 + 0.8 * unit(rng);
    const WeightVector p = random_probability(rng, 1 + t % 4).scaled(total * split);
    const WeightVector q = random_probability(rng, 1 + t % 3).scaled(total * (1.0 - split));
    const double a = 0.2 + 4.0 * unit(rng);
    const double b = 0.2 + 4.0 * unit(rng);
    if (std::abs(a - b) < 1e-3) continue;
    const EntropyParams ab(a, b);
    const double lhs = lne::log_norm_entropy(lne::concat(p, q), ab).value;
    CHECK(lhs >= lne::gm_subadditivity_rhs(p, q, ab) - 1e-12);
  }
}

TEST_CASE("generalized-mean bound at equal orders: the gap is a grouping entropy") {
  // At alpha == beta the link is linear and the bound becomes the
  // escort-mass-weighted mean; the union exceeds it by the binary entropy
  // of the two escort masses.
  const WeightVector p{0.2, 0.1, 0.05};
  const WeightVector q{0.4, 0.15};
  for (double b : {0.5, 1.0, 2.0}) {
    const double bp = std::exp(lne::log_power_sum(p, b));
    const double bq = std::exp(lne::log_power_sum(q, b));
    const double w = bp / (bp + bq);
    const double mean = w * lne_of(p, b, b) + (1.0 - w) * lne_of(q, b, b);
    const double gap = lne_of(lne::concat(p, q), b, b) - mean;
    const double binary = -w * std::log(w) - (1.0 - w) * std::log(1.0 - w);
    CHECK(std::abs(gap - binary) <= 1e-12);
    CHECK(gap > 0.1);
  }
}

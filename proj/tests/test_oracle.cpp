#include <doctest.h>

#include <cmath>

#include "lne/entropy.hpp"
#include "lne/errors.hpp"
#include "lne/optimize.hpp"
#include "lne/verify/oracle.hpp"

using lne::ConstraintSet;
using lne::EntropyParams;
using lne::WeightVector;
using lne::verify::oracle_maxent;

TEST_CASE("oracle: unconstrained optimum is uniform") {
  const WeightVector p = oracle_maxent(3, ConstraintSet(1.0), EntropyParams(2.0, 1.0), 1e-3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(p[i] - 1.0 / 3.0) <= 2e-3);
}

TEST_CASE("oracle: agrees with the solver on the worked case") {
  const ConstraintSet cs({{0.0, 1.0, 2.0}}, {0.8}, 1.0);
  const EntropyParams ab(2.0, 1.0);
  const WeightVector o = oracle_maxent(3, cs, ab, 1e-4);
  const auto s = lne::solve_maxent(3, cs, ab);
  CHECK(std::abs(lne::log_norm_entropy(o, ab).value - lne::log_norm_entropy(s.p, ab).value) <= 1e-3);
  CHECK(std::abs(o[0] - 13.0 / 30.0) <= 1e-2);
}

TEST_CASE("oracle: rejects bad input") {
  // targets outside the range of g are refused by the constraint set itself
  CHECK_THROWS_AS(ConstraintSet({{0.0, 1.0, 2.0}}, {2.5}, 1.0), lne::Infeasible);
  CHECK_THROWS_AS(oracle_maxent(5, ConstraintSet(1.0), EntropyParams(1.0, 1.0), 1e-2), lne::InvalidArgument);
  CHECK_THROWS_AS(oracle_maxent(3, ConstraintSet(1.0), EntropyParams(1.0, 1.0), 0.5), lne::InvalidArgument);
}

TEST_CASE("oracle: deterministic") {
  const ConstraintSet cs({{0.0, 3.0, 5.0}}, {2.0}, 0.5);
  const EntropyParams ab(0.5, 0.5);
  CHECK(oracle_maxent(3, cs, ab, 1e-3) == oracle_maxent(3, cs, ab, 1e-3));
}

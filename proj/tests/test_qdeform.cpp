#include <doctest.h>

#include <cmath>

#include "lne/errors.hpp"
#include "lne/qdeform.hpp"

using lne::DeformationIndex;
using lne::q_exp;
using lne::q_log;

namespace {

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("q_log examples") {
  for (double q : {-2.0, 0.0, 0.5, 1.0, 2.0, 3.0}) CHECK(q_log(1.0, DeformationIndex(q)) == 0.0);
  CHECK(q_log(std::exp(1.0), DeformationIndex(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(q_log(4.0, DeformationIndex(0.0)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(q_log(4.0, DeformationIndex(2.0)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(q_log(0.0, DeformationIndex(0.5)), lne::InvalidArgument);
  CHECK_THROWS_AS(q_log(-1.0, DeformationIndex(1.0)), lne::InvalidArgument);
  CHECK_THROWS_AS(DeformationIndex(std::nan("")), lne::InvalidArgument);
}

TEST_CASE("q_exp examples and cutoff") {
  for (double q : {-2.0, 0.0, 0.5, 1.0, 2.0, 3.0}) CHECK(q_exp(0.0, DeformationIndex(q)) == 1.0);
  CHECK(q_exp(-2.0, DeformationIndex(0.0)) == 0.0);
  CHECK(q_exp(3.0, DeformationIndex(0.0)) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(q_exp(1.0, DeformationIndex(1.0)) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  // bracket exactly zero: 0 when 1/(1-q) > 0, pole otherwise
  CHECK(q_exp(-1.0, DeformationIndex(0.0)) == 0.0);
  CHECK_THROWS_AS(q_exp(1.0, DeformationIndex(2.0)), lne::DomainError);
  // beyond the pole for q > 1 the bracket is negative: cut off
  CHECK(q_exp(2.0, DeformationIndex(2.0)) == 0.0);
}

TEST_CASE("classical routing near q = 1") {
  for (double x = 0.05; x <= 10.0; x += 0.05) {
    CHECK(std::abs(q_log(x, DeformationIndex(1.0 + 1e-10)) - std::log(x)) <= 1e-8);
    CHECK(std::abs(q_log(x, DeformationIndex(1.0 - 1e-10)) - std::log(x)) <= 1e-8);
  }
  // just outside the routing window the deformed formula stays accurate
  CHECK(std::abs(q_log(5.0, DeformationIndex(1.0 + 1e-7)) - std::log(5.0)) <= 1e-6);
}

TEST_CASE("inverse identity on the grid") {
  int checked = 0;
  for (double q = -2.0; q <= 3.0 + 1e-12; q += 0.25) {
    const DeformationIndex qi(q);
    for (double x = 0.1; x <= 10.0 + 1e-12; x += 0.1) {
      CHECK(close_rel(q_exp(q_log(x, qi), qi), x, 1e-10));
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("product identities") {
  for (double q : {-1.5, -0.5, 0.3, 0.9, 1.0, 1.4, 2.5}) {
    const DeformationIndex qi(q);
    const double k = 1.0 - q;
    for (double x : {-0.4, 0.0, 0.2, 0.7}) {
      for (double y : {-0.3, 0.1, 0.5}) {
        const double ex = q_exp(x, qi);
        const double ey = q_exp(y, qi);
        if (1.0 + k * x <= 0.0 || 1.0 + k * y <= 0.0) continue;
        CHECK(close_rel(ex * ey, q_exp(x + y + k * x * y, qi), 1e-10));
      }
    }
    for (double x : {0.2, 1.0, 3.0, 9.0}) {
      for (double y : {0.5, 2.0, 7.5}) {
        const double lx = q_log(x, qi);
        const double ly = q_log(y, qi);
        CHECK(close_rel(q_log(x * y, qi), lx + ly + k * lx * ly, 1e-10));
      }
    }
  }
}

TEST_CASE("derivatives against central differences") {
  const double h = 1e-6;
  for (double q : {-1.0, 0.0, 0.5, 1.0, 1.5, 2.0}) {
    const DeformationIndex qi(q);
    for (double x : {-0.3, 0.0, 0.2, 0.4}) {
      if (1.0 + (1.0 - q) * (x - h) <= 0.0) continue;
      const double fd = (q_exp(x + h, qi) - q_exp(x - h, qi)) / (2.0 * h);
      CHECK(close_rel(fd, std::pow(q_exp(x, qi), q), 1e-5));
    }
    for (double x : {0.3, 1.0, 2.0, 8.0}) {
      const double fd = (q_log(x + h, qi) - q_log(x - h, qi)) / (2.0 * h);
      CHECK(close_rel(fd, std::pow(x, -q), 1e-5));
    }
  }
}

#include "lne/crossent.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "lne/errors.hpp"

namespace lne {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_inputs(const WeightVector& p, const WeightVector& q, const EntropyParams& params, MassPolicy policy) {
  if (p.size() != q.size()) {
    throw InvalidArgument(fmt::format("P has {} states but Q has {}", p.size(), q.size()));
  }
  if (policy == MassPolicy::require_equal && std::abs(p.mass() - q.mass()) > tol_mass) {
    throw MassMismatch(fmt::format("W(P) = {} differs from W(Q) = {}", p.mass(), q.mass()));
  }
  const bool zero_prior_ok = !params.equal_orders() && params.beta() > params.alpha();
  if (zero_prior_ok) return;
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] == 0.0) bad.push_back(i);
  }
  if (!bad.empty()) {
    const std::string msg =
        fmt::format("prior is zero where P is positive at state {} (all: {})", bad.front(), fmt::join(bad, ","));
    throw DomainError(msg, std::move(bad));
  }
}

}  // namespace

CrossEntropyValue log_norm_cross_entropy(const WeightVector& p, const WeightVector& q, const EntropyParams& params,
                                         MassPolicy policy) {
  check_inputs(p, q, params, policy);
  const double a = params.alpha();
  const double b = params.beta();
  const std::vector<double> le = log_escort(p, b);

  double value = 0.0;
  if (params.equal_orders()) {
    // b sum E_i (ln p_i - ln q_i) - ln sum p^b, E the b-escort.
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0) s += std::exp(le[i]) * (std::log(p[i]) - std::log(q[i]));
    }
    value = b * s - log_power_sum(p, b);
  } else {
    // With p~ = P/||P||_b (so p~^b is the escort):
    //   CE = b/(a-b) ln sum E_i exp((b-a)(ln q_i - ln p~_i))
    std::vector<double> x(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (le[i] == kNegInf) continue;
      x[i] = (q[i] > 0.0 ? std::log(q[i]) : kNegInf) - le[i] / b;
    }
    value = b / (a - b) * log_exp_mean(le, x, b - a);
  }
  return CrossEntropyValue{value + 0.0, params, q.mass()};
}

double relative_entropy_bridge(const WeightVector& p, const WeightVector& q, const EntropyParams& params,
                               MassPolicy policy) {
  const double ce = log_norm_cross_entropy(p, q, params, policy).value;
  return (ce + params.beta() * log_norm(q, params.beta())) / params.alpha();
}

}  // namespace lne

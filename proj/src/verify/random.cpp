#include "lne/verify/random.hpp"

#include <cmath>

namespace lne::verify {

double Rng::log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

std::size_t Rng::integer(std::size_t lo, std::size_t hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  const auto k = static_cast<std::size_t>(uniform() * span);
  return lo + (k > hi - lo ? hi - lo : k);
}

double Rng::exponential() { return -std::log1p(-uniform()); }

WeightVector Rng::probability(std::size_t n, double floor) {
  std::vector<double> w(n);
  for (double& v : w) v = exponential() + floor;
  return WeightVector(std::move(w)).normalized();
}

WeightVector Rng::weights(std::size_t n, double zero_chance, double mass) {
  std::vector<double> w(n);
  bool any = false;
  for (double& v : w) {
    v = uniform() < zero_chance ? 0.0 : exponential() + 1e-3;
    any = any || v > 0.0;
  }
  if (!any) w[integer(0, n - 1)] = 1.0;
  return WeightVector(std::move(w)).normalized().scaled(mass);
}

}  // namespace lne::verify

#include "lne/figures.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lne/entropy.hpp"
#include "lne/errors.hpp"

namespace lne {

std::vector<CurveRow> bernoulli_curve(double alpha, std::span<const double> betas, double step) {
  if (!(step > 0.0 && step <= 0.5)) throw InvalidArgument(fmt::format("step must lie in (0, 0.5], got {}", step));
  if (betas.empty()) throw InvalidArgument("need at least one beta");
  const long K = std::lround(1.0 / step);
  std::vector<CurveRow> rows;
  rows.reserve(betas.size() * static_cast<std::size_t>(K + 1));
  for (double beta : betas) {
    const EntropyParams params(alpha, beta);
    for (long k = 0; k <= K; ++k) {
      const double p = static_cast<double>(k) / K;
      const WeightVector w({p, static_cast<double>(K - k) / K});
      rows.push_back({p, beta, log_norm_entropy(w, params).value});
    }
  }
  return rows;
}

WeightVector binomial_weights(int n, double p) {
  if (n < 1) throw InvalidArgument(fmt::format("binomial size must be >= 1, got {}", n));
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(fmt::format("binomial p must lie in [0, 1], got {}", p));
  std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
  if (p == 0.0) {
    w.front() = 1.0;
  } else if (p == 1.0) {
    w.back() = 1.0;
  } else {
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    for (int k = 0; k <= n; ++k) {
      const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      w[k] = std::exp(lc + k * lp + (n - k) * lq);
    }
  }
  return WeightVector(std::move(w));
}

std::vector<SurfaceRow> binomial_surface(int n, double p, std::span<const double> alphas,
                                         std::span<const double> betas) {
  if (alphas.empty() || betas.empty()) throw InvalidArgument("alpha and beta grids must be non-empty");
  const WeightVector w = binomial_weights(n, p);
  std::vector<SurfaceRow> rows;
  rows.reserve(alphas.size() * betas.size());
  for (double a : alphas) {
    for (double b : betas) rows.push_back({a, b, log_norm_entropy(w, EntropyParams(a, b)).value});
  }
  return rows;
}

}  // namespace lne

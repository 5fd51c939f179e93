#include "lne/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "lne/errors.hpp"

namespace lne {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_positive_order(double gamma, const char* name) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument(fmt::format("{} must be a finite positive real, got {}", name, gamma));
  }
}

}  // namespace

WeightVector::WeightVector(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw InvalidArgument("weight vector is empty");
  bool any_positive = false;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    const double v = w_[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument(fmt::format("weight {} is {}; weights must be finite and >= 0", i, v));
    }
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) throw InvalidArgument("weight vector has no positive entry");
}

WeightVector::WeightVector(std::initializer_list<double> weights)
    : WeightVector(std::vector<double>(weights)) {}

double WeightVector::mass() const noexcept {
  double s = 0.0;
  for (double v : w_) s += v;
  return s;
}

double WeightVector::max() const noexcept { return *std::max_element(w_.begin(), w_.end()); }

std::size_t WeightVector::support_size() const noexcept {
  return static_cast<std::size_t>(std::count_if(w_.begin(), w_.end(), [](double v) { return v > 0.0; }));
}

bool WeightVector::is_probability(double tol) const noexcept { return std::abs(mass() - 1.0) <= tol; }

bool WeightVector::is_subprobability(double tol) const noexcept { return mass() <= 1.0 + tol; }

WeightVector WeightVector::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument(fmt::format("scale factor must be positive, got {}", c));
  std::vector<double> out(w_);
  for (double& v : out) v *= c;
  return WeightVector(std::move(out));
}

WeightVector WeightVector::normalized() const {
  const double m = mass();
  std::vector<double> out(w_);
  for (double& v : out) v /= m;
  return WeightVector(std::move(out));
}

EntropyParams::EntropyParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  require_positive_order(alpha, "alpha");
  require_positive_order(beta, "beta");
}

bool EntropyParams::equal_orders() const noexcept { return std::abs(alpha_ - beta_) <= eps_order; }

double log_sum_exp(std::span<const double> x) {
  double m = kNegInf;
  for (double v : x) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double v : x) {
    if (v != kNegInf) s += std::exp(v - m);
  }
  return m + std::log(s);
}

double log_exp_mean(std::span<const double> log_w, std::span<const double> x, double delta) {
  if (log_w.size() != x.size()) throw InvalidArgument("log_exp_mean: length mismatch");
  if (delta == 0.0) return 0.0;

  double reach = 0.0;
  double lw_max = kNegInf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (log_w[i] == kNegInf) continue;
    reach = std::max(reach, std::abs(delta * x[i]));
    lw_max = std::max(lw_max, log_w[i]);
  }
  if (lw_max == kNegInf) throw InvalidArgument("log_exp_mean: all weights are zero");

  if (reach <= 0.5) {
    double s = 0.0;
    double t = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (log_w[i] == kNegInf) continue;
      const double w = std::exp(log_w[i] - lw_max);
      s += w;
      t += w * std::expm1(delta * x[i]);
    }
    return std::log1p(t / s);
  }

  std::vector<double> shifted(x.size(), kNegInf);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (log_w[i] == kNegInf) continue;
    const double dx = delta * x[i];
    shifted[i] = std::isnan(dx) ? kNegInf : log_w[i] + dx;
  }
  return log_sum_exp(shifted) - log_sum_exp(log_w);
}

double log_power_sum(const WeightVector& p, double gamma) {
  require_positive_order(gamma, "gamma");
  std::vector<double> terms(p.size(), kNegInf);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) terms[i] = gamma * std::log(p[i]);
  }
  return log_sum_exp(terms);
}

double log_norm(const WeightVector& p, double gamma) { return log_power_sum(p, gamma) / gamma; }

std::vector<double> log_escort(const WeightVector& p, double beta) {
  require_positive_order(beta, "beta");
  std::vector<double> out(p.size(), kNegInf);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) out[i] = beta * std::log(p[i]);
  }
  const double z = log_sum_exp(out);
  for (double& v : out) {
    if (v != kNegInf) v -= z;
  }
  return out;
}

WeightVector escort(const WeightVector& p, double beta) {
  std::vector<double> out = log_escort(p, beta);
  for (double& v : out) v = std::exp(v);
  return WeightVector(std::move(out));
}

WeightVector product_compose(const WeightVector& p, const WeightVector& q) {
  std::vector<double> out;
  out.reserve(p.size() * q.size());
  for (double a : p) {
    for (double b : q) out.push_back(a * b);
  }
  return WeightVector(std::move(out));
}

WeightVector concat(const WeightVector& p, const WeightVector& q) {
  std::vector<double> out(p.begin(), p.end());
  out.insert(out.end(), q.begin(), q.end());
  return WeightVector(std::move(out));
}

WeightVector robin_hood_transfer(const WeightVector& p, std::size_t from, std::size_t to, double amount) {
  if (from >= p.size() || to >= p.size() || from == to) {
    throw InvalidArgument(fmt::format("robin_hood_transfer: bad indices {} -> {} for size {}", from, to, p.size()));
  }
  const double gap = p[from] - p[to];
  if (!(gap > 0.0)) {
    throw InvalidArgument(fmt::format("robin_hood_transfer: p[{}] = {} is not larger than p[{}] = {}", from, p[from],
                                      to, p[to]));
  }
  if (!(amount > 0.0) || amount > gap / 2.0) {
    throw InvalidArgument(fmt::format("robin_hood_transfer: amount {} outside (0, {}]", amount, gap / 2.0));
  }
  std::vector<double> out(p.begin(), p.end());
  out[from] -= amount;
  out[to] += amount;
  return WeightVector(std::move(out));
}

bool majorizes(std::span<const double> a, std::span<const double> b, double tol) {
  const std::size_t n = std::max(a.size(), b.size());
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  sa.resize(n, 0.0);
  sb.resize(n, 0.0);
  std::sort(sa.begin(), sa.end(), std::greater<>());
  std::sort(sb.begin(), sb.end(), std::greater<>());
  double ca = 0.0;
  double cb = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    ca += sa[k];
    cb += sb[k];
    if (ca < cb - tol) return false;
  }
  return std::abs(ca - cb) <= tol;
}

}  // namespace lne

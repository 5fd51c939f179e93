#include "lne/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "lne/errors.hpp"

namespace lne {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_order(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(fmt::format("{} must be a finite positive real, got {}", name, v));
  }
}

void require_distinct(double alpha, double beta, const char* what) {
  if (std::abs(alpha - beta) <= eps_order) {
    throw InvalidArgument(fmt::format("{} needs alpha != beta, got alpha = {}, beta = {}", what, alpha, beta));
  }
}

std::vector<double> logs_of(const WeightVector& p) {
  std::vector<double> out(p.size(), kNegInf);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) out[i] = std::log(p[i]);
  }
  return out;
}

// -sum w_i ln p_i / sum w_i with w_i = p_i^beta, max-shifted.
double escort_mean_surprise(const WeightVector& p, double beta) {
  const std::vector<double> lp = logs_of(p);
  double m = kNegInf;
  for (double v : lp) m = std::max(m, v);
  double s = 0.0;
  double t = 0.0;
  for (double v : lp) {
    if (v == kNegInf) continue;
    const double w = std::exp(beta * (v - m));
    s += w;
    t += w * v;
  }
  return -t / s;
}

EntropyValue make(double v, Family f, std::optional<double> a = {}, std::optional<double> b = {}) {
  return EntropyValue{v + 0.0, f, a, b};
}

}  // namespace

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::shannon: return "shannon";
    case Family::renyi: return "renyi";
    case Family::tsallis: return "tsallis";
    case Family::kapur: return "kapur";
    case Family::norm: return "norm";
    case Family::aczel_daroczy: return "aczel_daroczy";
    case Family::lne: return "lne";
    case Family::min_entropy_scaled: return "min_entropy_scaled";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) noexcept {
  constexpr std::array all = {Family::shannon, Family::renyi, Family::tsallis, Family::kapur,
                              Family::norm,    Family::aczel_daroczy, Family::lne, Family::min_entropy_scaled};
  for (Family f : all) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

EntropyValue shannon(const WeightVector& p) {
  double s = 0.0;
  for (double v : p) {
    if (v > 0.0) s += v * std::log(v);
  }
  return make(-s / p.mass(), Family::shannon);
}

EntropyValue renyi(const WeightVector& p, double alpha) {
  require_order(alpha, "alpha");
  if (std::abs(alpha - 1.0) <= eps_order) {
    auto h = shannon(p);
    return make(h.value, Family::renyi, alpha);
  }
  const std::vector<double> lp = logs_of(p);
  // ln[sum p^alpha / sum p] = ln[ sum p * p^(alpha-1) / sum p ]
  const double l = log_exp_mean(lp, lp, alpha - 1.0);
  return make(-l / (alpha - 1.0), Family::renyi, alpha);
}

EntropyValue tsallis(const WeightVector& p, double q) {
  if (!std::isfinite(q)) throw InvalidArgument("tsallis: q must be finite");
  if (!p.is_probability()) {
    throw InvalidArgument(fmt::format("tsallis is defined on probability vectors; mass is {}", p.mass()));
  }
  if (std::abs(q - 1.0) <= eps_order) {
    auto h = shannon(p);
    return make(h.value, Family::tsallis, q);
  }
  double s = 0.0;
  for (double v : p) {
    if (v > 0.0) s -= v * std::expm1((q - 1.0) * std::log(v));
  }
  return make(s / (q - 1.0), Family::tsallis, q);
}

EntropyValue kapur(const WeightVector& p, double alpha, double beta) {
  require_order(alpha, "alpha");
  require_order(beta, "beta");
  require_distinct(alpha, beta, "kapur");
  const std::vector<double> lp = logs_of(p);
  std::vector<double> lw(lp);
  for (double& v : lw) {
    if (v != kNegInf) v *= beta;
  }
  // ln(sum p^alpha / sum p^beta) as a weighted exponential mean
  const double l = log_exp_mean(lw, lp, alpha - beta);
  return make(-l / (alpha - beta), Family::kapur, alpha, beta);
}

EntropyValue norm_entropy(const WeightVector& p, double alpha, double beta) {
  require_order(alpha, "alpha");
  require_order(beta, "beta");
  require_distinct(alpha, beta, "norm_entropy");
  // ||P||_b - ||P||_a = -||P||_b expm1(ln||P||_a - ln||P||_b), and the log
  // difference is -(a-b)/(ab) times the LNE.
  const double e = log_norm_entropy(p, EntropyParams(alpha, beta)).value;
  const double k = alpha * beta / (alpha - beta);
  const double nb = std::exp(log_norm(p, beta));
  return make(-k * nb * std::expm1(-e / k), Family::norm, alpha, beta);
}

EntropyValue aczel_daroczy(const WeightVector& p, double beta) {
  require_order(beta, "beta");
  return make(escort_mean_surprise(p, beta), Family::aczel_daroczy, std::nullopt, beta);
}

EntropyValue log_norm_entropy(const WeightVector& p, const EntropyParams& params) {
  const double a = params.alpha();
  const double b = params.beta();
  if (p.support_size() == 1) return make(0.0, Family::lne, a, b);

  if (params.equal_orders()) {
    const double v = b * (escort_mean_surprise(p, b) + log_norm(p, b));
    return make(v, Family::lne, a, b);
  }

  // Renyi entropy of order hi/lo of the lo-escort. Ordering the pair makes
  // the result exactly symmetric in (alpha, beta).
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const double delta = hi / lo - 1.0;
  const std::vector<double> le = log_escort(p, lo);
  const double l = log_exp_mean(le, le, delta);
  return make(-l / delta, Family::lne, a, b);
}

EntropyValue lne_min_entropy_limit(const WeightVector& p, double beta) {
  require_order(beta, "beta");
  if (p.support_size() == 1) return make(0.0, Family::min_entropy_scaled, std::nullopt, beta);
  const double v = beta * (-std::log(p.max()) + log_norm(p, beta));
  return make(v, Family::min_entropy_scaled, std::nullopt, beta);
}

double gm_subadditivity_rhs(const WeightVector& p, const WeightVector& q, const EntropyParams& params) {
  if (params.equal_orders()) {
    throw InvalidArgument("gm_subadditivity_rhs: alpha == beta degenerates to a linear mean; not handled here");
  }
  const double total = p.mass() + q.mass();
  if (total > 1.0 + tol_mass) {
    throw InvalidArgument(fmt::format("gm_subadditivity_rhs needs W(P) + W(Q) <= 1, got {}", total));
  }
  const double a = params.alpha();
  const double b = params.beta();
  // g(x) = 2^(k x / ln 2) = e^(k x); the g-mean is then a log-exp mean.
  const double k = 1.0 - a / b;
  const std::array<double, 2> log_weights = {a * log_norm(p, b), a * log_norm(q, b)};
  const std::array<double, 2> values = {log_norm_entropy(p, params).value, log_norm_entropy(q, params).value};
  return log_exp_mean(log_weights, values, k) / k;
}

}  // namespace lne

#pragma once

// Stable primitives over finite nonnegative weight vectors.
//
// Every power sum in this library is evaluated in the log domain with a
// max shift, so orders in the hundreds (or tiny weights) neither overflow
// nor underflow. Zero weights are dropped from all sums (0 * ln 0 := 0).

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lne {

/// Mass tolerance for probability / sub-probability membership.
inline constexpr double tol_mass = 1e-9;

/// Two orders closer than this are treated as equal (alpha == beta branch).
inline constexpr double eps_order = 1e-8;

/// Finite nonnegative weights with positive total mass.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights);
  WeightVector(std::initializer_list<double> weights);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const noexcept { return w_; }
  auto begin() const noexcept { return w_.begin(); }
  auto end() const noexcept { return w_.end(); }

  /// W(P), the total mass.
  double mass() const noexcept;
  double max() const noexcept;
  std::size_t support_size() const noexcept;

  bool is_probability(double tol = tol_mass) const noexcept;
  bool is_subprobability(double tol = tol_mass) const noexcept;

  WeightVector scaled(double c) const;
  WeightVector normalized() const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> w_;
};

/// The pair of strictly positive orders selecting a family member.
class EntropyParams {
 public:
  EntropyParams(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  bool equal_orders() const noexcept;
  EntropyParams swapped() const { return EntropyParams(beta_, alpha_); }

 private:
  double alpha_;
  double beta_;
};

/// ln sum_i exp(x_i); -inf entries are skipped, empty or all -inf gives -inf.
double log_sum_exp(std::span<const double> x);

/// ln( sum_i w_i exp(delta x_i) / sum_i w_i ), with the weights given as
/// logs. Small |delta x| goes through expm1/log1p so the result keeps full
/// relative precision as delta -> 0; otherwise a max-shifted log-sum-exp.
double log_exp_mean(std::span<const double> log_w, std::span<const double> x,
                    double delta);

/// ln sum_i p_i^gamma over the support.
double log_power_sum(const WeightVector& p, double gamma);

/// ln ||P||_gamma = (1/gamma) ln sum_i p_i^gamma.
double log_norm(const WeightVector& p, double gamma);

/// Elementwise ln of the beta-escort, -inf on zero weights.
std::vector<double> log_escort(const WeightVector& p, double beta);

/// p_i^beta / sum_j p_j^beta.
WeightVector escort(const WeightVector& p, double beta);

/// Independent combination P*Q = (p_i q_j), row-major in i.
WeightVector product_compose(const WeightVector& p, const WeightVector& q);

/// Concatenation P u Q = (p_1..p_n, q_1..q_m).
WeightVector concat(const WeightVector& p, const WeightVector& q);

/// Moves `amount` from a larger coordinate to a smaller one without
/// overshooting equality; the result is majorized by the input.
WeightVector robin_hood_transfer(const WeightVector& p, std::size_t from,
                                 std::size_t to, double amount);

/// True when `a` majorizes `b`: equal totals and dominating prefix sums of
/// the decreasingly sorted entries. Shorter inputs are padded with zeros.
bool majorizes(std::span<const double> a, std::span<const double> b,
               double tol = 0.0);

}  // namespace lne

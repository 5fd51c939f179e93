#pragma once

// Deformed logarithm and exponential:
//   ln_q x = (x^(1-q) - 1) / (1 - q),            x > 0
//   e_q^x  = [1 + (1-q) x]^(1/(1-q)) if the bracket is >= 0, else 0.
// Both reduce to ln / exp as q -> 1.

namespace lne {

/// Deformation parameter q. Within eps_order of 1 it selects the classical
/// functions.
class DeformationIndex {
 public:
  explicit DeformationIndex(double q);

  double q() const noexcept { return q_; }
  bool is_classical() const noexcept;

 private:
  double q_;
};

double q_log(double x, DeformationIndex q);

/// Total except on the pole: a bracket of exactly zero with 1/(1-q) < 0
/// throws DomainError.
double q_exp(double x, DeformationIndex q);

}  // namespace lne

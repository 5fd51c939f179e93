#pragma once

// Constrained LNE maximization and LNCE minimization under normalized
// q-expectation constraints with q = beta:
//
//   sum_i g_r(i) p_i^beta / sum_i p_i^beta = G_r,   r = 1..m.
//
// Stationary points form the family (s_i = sum_r lambda_r (g_r(i) - G_r))
//
//   alpha != beta:  p_i ∝ q_i [1 + (alpha - beta) s_i]^(1/(alpha - beta))
//   alpha == beta:  p_i ∝ q_i exp(s_i)
//
// with q_i = 1 for MaxEnt and the prior for MinXEnt. The multipliers are
// found by damped Newton on the m constraint residuals.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lne/errors.hpp"
#include "lne/numkit.hpp"

namespace lne {

/// Tabulated constraint functions g_r over n states with targets G_r.
class ConstraintSet {
 public:
  /// No constraints (m = 0).
  explicit ConstraintSet(double q_index);

  /// Throws InvalidArgument on shape errors, DegenerateConstraint on a
  /// constant g_r, Infeasible when G_r is not strictly inside (min g_r, max g_r).
  ConstraintSet(std::vector<std::vector<double>> g, std::vector<double> targets, double q_index);

  std::size_t count() const noexcept { return g_.size(); }
  /// Number of states the g_r are tabulated on; 0 when there are none.
  std::size_t states() const noexcept { return g_.empty() ? 0 : g_.front().size(); }
  std::span<const double> g(std::size_t r) const { return g_.at(r); }
  double target(std::size_t r) const { return targets_.at(r); }
  double q_index() const noexcept { return q_index_; }

  /// Feasibility precheck restricted to the states where support[i] is true.
  void check_feasible(const std::vector<bool>& support) const;

 private:
  std::vector<std::vector<double>> g_;
  std::vector<double> targets_;
  double q_index_;
};

struct SolverConfig {
  double tol_residual = 1e-10;
  int max_iter = 200;
  double damping = 1.0;  // initial step factor, halved on backtrack
  double fd_step = 1e-7;
  int restarts = 8;
  std::uint64_t seed = 20240531;

  void validate() const;
};

struct SolverReport {
  int iterations = 0;
  double final_residual_norm = 0.0;  // max_r |<<g_r>>_beta - G_r|
  bool converged = false;
  int restarts_used = 0;
  std::vector<std::size_t> clamped_states;
};

enum class Branch { power_law, exponential };

const char* to_string(Branch b) noexcept;

struct MaxEntSolution {
  WeightVector p;
  std::vector<double> lambdas;
  double Z = 0.0;
  Branch branch = Branch::power_law;
  SolverReport report;
};

/// All restarts exhausted; carries the lowest-residual attempt.
class NotConverged : public Error {
 public:
  explicit NotConverged(MaxEntSolution best);
  const MaxEntSolution& best() const noexcept { return best_; }

 private:
  MaxEntSolution best_;
};

/// sum g(i) p_i^q / sum p_i^q.
double normalized_q_expectation(const WeightVector& p, std::span<const double> g, double q);

/// Member of the stationary family at the given multipliers, before any
/// solve. `prior` is the MinXEnt prior (all ones for MaxEnt).
struct FamilyMember {
  WeightVector p;
  double Z;
  std::vector<std::size_t> clamped_states;
};

/// For alpha > beta a negative bracket is cut off (p_i = 0, state reported
/// as clamped). For alpha < beta the exponent is negative, p_i blows up as
/// the bracket reaches 0, and a non-positive bracket throws DomainError
/// listing the states.
FamilyMember stationary_family(const WeightVector& prior, const ConstraintSet& constraints,
                               const EntropyParams& params, std::span<const double> lambdas);

MaxEntSolution solve_maxent(std::size_t n, const ConstraintSet& constraints, const EntropyParams& params,
                            const SolverConfig& cfg = {});

MaxEntSolution solve_minxent(const WeightVector& prior, const ConstraintSet& constraints,
                             const EntropyParams& params, const SolverConfig& cfg = {});

}  // namespace lne

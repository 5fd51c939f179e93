#pragma once

// Logarithmic norm cross-entropy (LNCE) between a variable distribution P
// and a prior Q of equal mass:
//
//   CE_{a,b}(P,Q) = ab/(a-b) [ (1/a) ln sum p_i^a q_i^(b-a) - ln||P||_b ]
//   CE_{b,b}(P,Q) = b sum p_i^b ln(p_i/q_i) / sum p_i^b - b ln||P||_b
//
// It is invariant under P -> cP, equals b ln(n/W) - E_{a,b}(P) for a uniform
// prior, and is the Renyi directed divergence of order a when b = 1.

#include "lne/numkit.hpp"

namespace lne {

struct CrossEntropyValue {
  double value = 0.0;
  EntropyParams params;
  double prior_mass = 0.0;
};

enum class MassPolicy {
  require_equal,  // |W(P) - W(Q)| <= tol_mass or MassMismatch
  ignore,
};

/// Zero p_i are dropped. p_i > 0 with q_i = 0 throws DomainError (naming the
/// states) whenever q_i would carry a negative exponent or sit in a log ratio,
/// i.e. unless beta > alpha.
CrossEntropyValue log_norm_cross_entropy(const WeightVector& p, const WeightVector& q, const EntropyParams& params,
                                         MassPolicy policy = MassPolicy::require_equal);

/// Relative (beta,alpha)-entropy RE = [ CE_{a,b}(P,Q) + beta ln||Q||_beta ] / alpha.
/// Invariant under scaling of either argument and zero at P = Q.
double relative_entropy_bridge(const WeightVector& p, const WeightVector& q, const EntropyParams& params,
                               MassPolicy policy = MassPolicy::require_equal);

}  // namespace lne

#pragma once

// Entropy functionals over finite weight vectors, in nats.
//
// The logarithmic norm entropy (LNE)
//
//   E_{a,b}(P) = ab/(a-b) [ ln||P||_b - ln||P||_a ],      a != b
//   E_{b,b}(P) = b [ AD_b(P) + ln||P||_b ],               a == b
//
// is scale invariant, symmetric in (a, b), lies in [0, ln n], and equals the
// Renyi entropy of order a/b of the b-escort of P. The classical families it
// generalizes are provided alongside for comparison and cross-checks.

#include <optional>
#include <string_view>

#include "lne/numkit.hpp"

namespace lne {

enum class Family { shannon, renyi, tsallis, kapur, norm, aczel_daroczy, lne, min_entropy_scaled };

std::string_view to_string(Family f) noexcept;
std::optional<Family> parse_family(std::string_view name) noexcept;

struct EntropyValue {
  double value = 0.0;
  Family family = Family::lne;
  // Orders used; single-order families fill only one. Tsallis stores q in alpha.
  std::optional<double> alpha;
  std::optional<double> beta;
};

/// -(1/W) sum p_i ln p_i.
EntropyValue shannon(const WeightVector& p);

/// (1/(1-alpha)) ln[ sum p_i^alpha / sum p_i ]; Shannon within eps_order of 1.
EntropyValue renyi(const WeightVector& p, double alpha);

/// (1 - sum p_i^q)/(q - 1) on probability vectors only, evaluated as
/// sum p_i (1 - p_i^(q-1))/(q - 1) so it stays accurate near q = 1.
EntropyValue tsallis(const WeightVector& p, double q);

/// Kapur's entropy of order alpha and type beta. Rejects alpha ~ beta.
EntropyValue kapur(const WeightVector& p, double alpha, double beta);

/// (alpha,beta)-norm entropy ab/(a-b) [||P||_b - ||P||_a]. Rejects alpha ~ beta.
EntropyValue norm_entropy(const WeightVector& p, double alpha, double beta);

/// -sum p_i^beta ln p_i / sum p_i^beta.
EntropyValue aczel_daroczy(const WeightVector& p, double beta);

EntropyValue log_norm_entropy(const WeightVector& p, const EntropyParams& params);

/// alpha -> infinity limit of the LNE: beta [ -ln p_max + ln||P||_beta ].
EntropyValue lne_min_entropy_limit(const WeightVector& p, double beta);

/// Right-hand side of the generalized-mean sub-additivity bound: the
/// g-mean of E(P), E(Q) with weights ||.||_beta^alpha and link
/// g(x) = 2^((1 - alpha/beta) x / ln 2).
///
/// The norm ordering ||v||_beta <= ||v||_alpha for alpha < beta (and the
/// reverse otherwise) gives E(P u Q) >= rhs for every alpha != beta.
/// Requires alpha != beta and W(P) + W(Q) <= 1.
double gm_subadditivity_rhs(const WeightVector& p, const WeightVector& q, const EntropyParams& params);

}  // namespace lne

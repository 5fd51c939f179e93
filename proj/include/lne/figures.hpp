#pragma once

// Data behind the Bernoulli curve and binomial surface figures: the LNE of
// {p, 1-p} over a p grid, and of Bin(n, p) weights over an (alpha, beta) grid.

#include <span>
#include <vector>

#include "lne/numkit.hpp"

namespace lne {

struct CurveRow {
  double p;
  double beta;
  double value;
};

struct SurfaceRow {
  double alpha;
  double beta;
  double value;
};

/// Rows for p = k/K, k = 0..K with K = round(1/step), for each beta in turn.
/// The weights are built as {k/K, (K-k)/K}, so mirrored rows are exact swaps.
/// Requires 0 < step <= 0.5 and positive orders.
std::vector<CurveRow> bernoulli_curve(double alpha, std::span<const double> betas, double step);

/// The n+1 binomial weights C(n,k) p^k (1-p)^(n-k), via lgamma. p = 0 and
/// p = 1 give the degenerate vectors.
WeightVector binomial_weights(int n, double p);

/// Rows in alpha-major order over the two grids.
std::vector<SurfaceRow> binomial_surface(int n, double p, std::span<const double> alphas,
                                         std::span<const double> betas);

}  // namespace lne

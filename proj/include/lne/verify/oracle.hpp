#pragma once

#include <cstddef>

#include "lne/numkit.hpp"
#include "lne/optimize.hpp"

namespace lne::verify {

/// Brute-force MaxEnt over the probability simplex, for checking solvers.
///
/// Enumerates every point of the lattice {k / K : sum k = K}, K = round(1 /
/// grid_step), twice: once read as p and once as the beta-escort of p. Keeps
/// the points whose normalized beta-expectations lie within 10 * grid_step
/// of the targets and returns the one with the largest LNE (evaluated from
/// its own power tables, not the library). Among values within 1e-12 of each
/// other the p lattice, then the lexicographically smallest point, wins.
///
/// Requires n <= 4, at most 2 constraints and grid_step in [1e-4, 1e-2].
/// Throws Infeasible when a target lies outside [min g, max g] or no
/// lattice point survives the filter.
WeightVector oracle_maxent(std::size_t n, const ConstraintSet& constraints, const EntropyParams& params,
                           double grid_step);

}  // namespace lne::verify

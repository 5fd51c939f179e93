#include "lne/verify/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "lne/errors.hpp"

namespace lne::verify {

namespace {

struct Tables {
  std::vector<double> pow_a;      // p^alpha
  std::vector<double> pow_b;      // p^beta
  std::vector<double> pow_b_log;  // p^beta ln p, 0 at p = 0
  std::vector<double> p;          // unnormalized weight of lattice value k
};

// Lattice value x = k/K is p itself, or the beta-escort coordinate with
// p = x^(1/beta). The LNE is scale invariant, so p need not sum to 1.
Tables build_tables(int K, double a, double b, bool escort_lattice) {
  Tables t;
  t.pow_a.assign(K + 1, 0.0);
  t.pow_b.assign(K + 1, 0.0);
  t.pow_b_log.assign(K + 1, 0.0);
  t.p.assign(K + 1, 0.0);
  for (int k = 1; k <= K; ++k) {
    const double x = static_cast<double>(k) / K;
    if (escort_lattice) {
      t.p[k] = std::pow(x, 1.0 / b);
      t.pow_a[k] = std::pow(x, a / b);
      t.pow_b[k] = x;
      t.pow_b_log[k] = x * std::log(x) / b;
    } else {
      t.p[k] = x;
      t.pow_a[k] = std::pow(x, a);
      t.pow_b[k] = std::pow(x, b);
      t.pow_b_log[k] = t.pow_b[k] * std::log(x);
    }
  }
  return t;
}

struct Search {
  std::size_t n;
  int K;
  double a;
  double b;
  bool diagonal;
  double band;
  const ConstraintSet* cs;
  std::vector<std::vector<double>> g;
  std::vector<double> target;
  Tables tab;

  std::vector<int> k;
  std::vector<int> best;
  double best_value = -1.0;

  double entropy_here() const {
    double sa = 0.0;
    double sb = 0.0;
    double sbl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sa += tab.pow_a[k[i]];
      sb += tab.pow_b[k[i]];
      sbl += tab.pow_b_log[k[i]];
    }
    if (diagonal) return b * (-sbl / sb + std::log(sb) / b);
    return a * b / (a - b) * (std::log(sb) / b - std::log(sa) / a);
  }

  void visit() {
    const double v = entropy_here();
    if (best.empty() || v > best_value + 1e-12) {
      best = k;
      best_value = v;
    }
  }

  // k[pos..] share `left` lattice units; walk them in lexicographic order.
  // sb and t[r] carry sum p^beta and sum g_r p^beta over k[0..pos).
  void walk(std::size_t pos, int left, double sb, const double* t) {
    const std::size_t m = cs->count();
    if (pos + 1 == n) {
      k[pos] = left;
      const double w = tab.pow_b[left];
      if (passes(sb + w, t, pos, w)) visit();
      return;
    }
    if (pos + 2 == n) {
      // innermost pair in one tight loop
      for (int v = 0; v <= left; ++v) {
        const double w1 = tab.pow_b[v];
        const double w2 = tab.pow_b[left - v];
        const double s = sb + w1 + w2;
        bool ok = true;
        for (std::size_t r = 0; r < m && ok; ++r) {
          const double tr = t[r] + g[r][pos] * w1 + g[r][pos + 1] * w2;
          ok = std::abs(tr - target[r] * s) <= band * s;
        }
        if (!ok) continue;
        k[pos] = v;
        k[pos + 1] = left - v;
        visit();
      }
      return;
    }
    double next[2] = {0.0, 0.0};
    for (int v = 0; v <= left; ++v) {
      const double w = tab.pow_b[v];
      for (std::size_t r = 0; r < m; ++r) next[r] = t[r] + g[r][pos] * w;
      k[pos] = v;
      walk(pos + 1, left - v, sb + w, next);
    }
  }

  bool passes(double s, const double* t, std::size_t pos, double w) const {
    for (std::size_t r = 0; r < cs->count(); ++r) {
      if (!(std::abs(t[r] + g[r][pos] * w - target[r] * s) <= band * s)) return false;
    }
    return true;
  }
};

}  // namespace

WeightVector oracle_maxent(std::size_t n, const ConstraintSet& constraints, const EntropyParams& params,
                           double grid_step) {
  if (n < 1 || n > 4) throw InvalidArgument(fmt::format("oracle_maxent handles 1..4 states, got {}", n));
  if (constraints.count() > 2) {
    throw InvalidArgument(fmt::format("oracle_maxent handles at most 2 constraints, got {}", constraints.count()));
  }
  if (!(grid_step >= 1e-4 && grid_step <= 1e-2)) {
    throw InvalidArgument(fmt::format("grid step {} outside [1e-4, 1e-2]", grid_step));
  }
  if (constraints.count() > 0 && constraints.states() != n) {
    throw InvalidArgument("constraints and oracle disagree on the number of states");
  }
  for (std::size_t r = 0; r < constraints.count(); ++r) {
    auto g = constraints.g(r);
    const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
    if (constraints.target(r) < *lo || constraints.target(r) > *hi) {
      throw Infeasible(fmt::format("target G_{} = {} outside [{}, {}]", r, constraints.target(r), *lo, *hi));
    }
  }

  // Two lattices at the same resolution: uniform in p, and uniform in the
  // beta-escort, which resolves small p when beta < 1 and makes the
  // constraints linear. The better survivor wins, the p lattice on ties.
  std::vector<double> best_p;
  double best_value = 0.0;
  for (bool escort_lattice : {false, true}) {
    Search s;
    s.n = n;
    s.K = static_cast<int>(std::lround(1.0 / grid_step));
    s.a = params.alpha();
    s.b = params.beta();
    s.diagonal = params.equal_orders();
    s.band = 10.0 * grid_step;
    s.cs = &constraints;
    s.tab = build_tables(s.K, s.a, s.b, escort_lattice);
    for (std::size_t r = 0; r < constraints.count(); ++r) {
      s.g.emplace_back(constraints.g(r).begin(), constraints.g(r).end());
      s.target.push_back(constraints.target(r));
    }
    s.k.assign(n, 0);
    const double zero[2] = {0.0, 0.0};
    s.walk(0, s.K, 0.0, zero);
    if (s.best.empty() || (!best_p.empty() && !(s.best_value > best_value + 1e-12))) continue;
    best_value = s.best_value;
    best_p.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) best_p[i] = s.tab.p[s.best[i]];
  }
  if (best_p.empty()) throw Infeasible("no lattice point satisfies the constraints within the residual band");
  return WeightVector(std::move(best_p)).normalized();
}

}  // namespace lne::verify

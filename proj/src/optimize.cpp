#include "lne/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace lne {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Everything the residual map needs, with g_r(i) - G_r precomputed.
struct Problem {
  std::vector<double> log_prior;  // -inf off the support
  std::vector<std::vector<double>> centred;
  double alpha;
  double beta;
  bool exponential;

  std::size_t n() const { return log_prior.size(); }
  std::size_t m() const { return centred.size(); }
};

struct Member {
  std::vector<double> log_w;  // unnormalized ln p_i
  std::vector<std::size_t> clamped;
  std::vector<std::size_t> blown;  // alpha < beta with a non-positive bracket
};

Member evaluate(const Problem& pb, std::span<const double> lambdas) {
  Member out;
  out.log_w.assign(pb.n(), kNegInf);
  const double d = pb.alpha - pb.beta;
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (pb.log_prior[i] == kNegInf) continue;
    double s = 0.0;
    for (std::size_t r = 0; r < pb.m(); ++r) s += lambdas[r] * pb.centred[r][i];
    if (pb.exponential) {
      out.log_w[i] = pb.log_prior[i] + s;
      continue;
    }
    const double t = d * s;
    if (t > -1.0) {
      out.log_w[i] = pb.log_prior[i] + std::log1p(t) / d;
    } else if (d > 0.0) {
      out.clamped.push_back(i);
    } else {
      out.blown.push_back(i);
    }
  }
  return out;
}

bool admissible(const Member& mb) {
  if (!mb.blown.empty()) return false;
  return std::any_of(mb.log_w.begin(), mb.log_w.end(), [](double v) { return v != kNegInf; });
}

// R_r = sum_i (g_r(i) - G_r) E_i with E the beta-escort of the member.
std::vector<double> residuals(const Problem& pb, const Member& mb) {
  std::vector<double> le(pb.n(), kNegInf);
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (mb.log_w[i] != kNegInf) le[i] = pb.beta * mb.log_w[i];
  }
  const double z = log_sum_exp(le);
  std::vector<double> r(pb.m(), 0.0);
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (le[i] == kNegInf) continue;
    const double e = std::exp(le[i] - z);
    for (std::size_t k = 0; k < pb.m(); ++k) r[k] += pb.centred[k][i] * e;
  }
  return r;
}

// With too many states clamped the residual stops depending on lambda and
// Newton stalls; such points are treated like inadmissible ones.
bool responsive(const Problem& pb, const Member& mb) {
  std::size_t alive = 0;
  for (double v : mb.log_w) alive += v != kNegInf;
  if (alive <= pb.m()) return false;
  for (const auto& g : pb.centred) {
    double lo = kInf;
    double hi = -kInf;
    for (std::size_t i = 0; i < pb.n(); ++i) {
      if (mb.log_w[i] == kNegInf) continue;
      lo = std::min(lo, g[i]);
      hi = std::max(hi, g[i]);
    }
    if (!(hi > lo)) return false;
  }
  return true;
}

// Residual vector at lambda, or nullopt outside the admissible region.
std::optional<std::vector<double>> residual_at(const Problem& pb, std::span<const double> lambdas) {
  Member mb = evaluate(pb, lambdas);
  if (!admissible(mb) || !responsive(pb, mb)) return std::nullopt;
  return residuals(pb, mb);
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_inf(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Solves J x = b in place by Gaussian elimination with partial pivoting.
// Returns false on a (numerically) singular matrix.
bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t m = b.size();
  double scale = 0.0;
  for (const auto& row : a) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  if (!(scale > 0.0)) return false;
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) <= 1e-14 * scale) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < m; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < m; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(m, 0.0);
  for (std::size_t c = m; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < m; ++k) s -= a[c][k] * x[k];
    x[c] = s / a[c][c];
  }
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

struct Attempt {
  std::vector<double> lambdas;
  double residual = kInf;  // inf norm
  int iterations = 0;
  std::optional<Member> member;  // set when p was built without going through lambda
};

Attempt newton(const Problem& pb, std::vector<double> lambdas, const SolverConfig& cfg) {
  Attempt at;
  auto f = residual_at(pb, lambdas);
  if (!f) return at;
  at.lambdas = lambdas;
  at.residual = norm_inf(*f);

  const std::size_t m = pb.m();
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (at.residual <= cfg.tol_residual) break;
    at.iterations = it + 1;

    // forward differences, stepping backwards when the forward point leaves
    // the admissible region
    std::vector<std::vector<double>> jac(m, std::vector<double>(m, 0.0));
    bool jac_ok = true;
    for (std::size_t j = 0; j < m && jac_ok; ++j) {
      const double h = cfg.fd_step * std::max(1.0, std::abs(lambdas[j]));
      std::vector<double> probe = lambdas;
      probe[j] += h;
      auto fp = residual_at(pb, probe);
      double step = h;
      if (!fp) {
        probe[j] = lambdas[j] - h;
        fp = residual_at(pb, probe);
        step = -h;
      }
      if (!fp) {
        jac_ok = false;
        break;
      }
      for (std::size_t r = 0; r < m; ++r) jac[r][j] = ((*fp)[r] - (*f)[r]) / step;
    }
    std::vector<double> dir;
    std::vector<double> rhs(m);
    for (std::size_t r = 0; r < m; ++r) rhs[r] = -(*f)[r];
    if (!jac_ok || !solve_dense(jac, rhs, dir)) break;

    const double base = norm2(*f);
    bool accepted = false;
    for (double t = cfg.damping; t >= 1e-12; t *= 0.5) {
      std::vector<double> trial(m);
      for (std::size_t r = 0; r < m; ++r) trial[r] = lambdas[r] + t * dir[r];
      auto ft = residual_at(pb, trial);
      if (ft && norm2(*ft) < base) {
        lambdas = std::move(trial);
        f = std::move(ft);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    at.lambdas = lambdas;
    at.residual = norm_inf(*f);
  }
  return at;
}

// The stationarity system is the gradient of a convex potential. With
// x_i = 1 + (a-b) s_i and kappa = b/(a-b),
//   phi(lambda) = (1/a) sum_i q_i^b x_i^(a/(a-b)),  grad = sum_i c_i q_i^b x_i^kappa
// (alpha = beta: phi = (1/b) sum_i q_i^b exp(b s_i)). The gradient is the
// residual up to the positive factor sum e_i, so minimizing phi solves the
// system; unlike the residual norm, phi has no flat regions and its descent
// is not stalled by the cusp at a cutoff.
struct Potential {
  double value = kInf;
  std::vector<double> grad;
  std::vector<std::vector<double>> hess;
};

Potential potential(const Problem& pb, std::span<const double> lambdas) {
  const std::size_t m = pb.m();
  const double a = pb.alpha;
  const double b = pb.beta;
  const double d = a - b;
  Potential out;
  out.value = 0.0;
  out.grad.assign(m, 0.0);
  out.hess.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (pb.log_prior[i] == kNegInf) continue;
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += lambdas[r] * pb.centred[r][i];
    const double qb = std::exp(b * pb.log_prior[i]);
    double f = 0.0;    // potential term
    double g = 0.0;    // gradient weight
    double h = 0.0;    // Hessian weight
    if (pb.exponential) {
      const double e = qb * std::exp(b * s);
      f = e / b;
      g = e;
      h = b * e;
    } else {
      const double x = 1.0 + d * s;
      if (!(x > 0.0)) {
        if (d < 0.0) return Potential{};  // barrier: outside the admissible region
        continue;                          // clamped, contributes nothing
      }
      const double lx = std::log(x);
      const double xk = std::exp(b / d * lx);
      f = qb * xk * x / a;
      g = qb * xk;
      h = qb * b * std::exp((b / d - 1.0) * lx);
    }
    if (!std::isfinite(f) || !std::isfinite(g)) return Potential{};
    out.value += f;
    for (std::size_t r = 0; r < m; ++r) {
      out.grad[r] += g * pb.centred[r][i];
      for (std::size_t c = 0; c < m; ++c) out.hess[r][c] += h * pb.centred[r][i] * pb.centred[c][i];
    }
  }
  return out;
}

// Residual of the normalized constraints at lambda, ignoring responsiveness.
double raw_residual(const Problem& pb, std::span<const double> lambdas) {
  const Member mb = evaluate(pb, lambdas);
  if (!admissible(mb)) return kInf;
  return norm_inf(residuals(pb, mb));
}

Attempt descend(const Problem& pb, std::vector<double> lambdas, const SolverConfig& cfg) {
  Attempt at;
  const std::size_t m = pb.m();
  Potential cur = potential(pb, lambdas);
  if (!std::isfinite(cur.value)) return at;
  at.lambdas = lambdas;
  at.residual = raw_residual(pb, lambdas);
  for (int it = 0; it < cfg.max_iter && at.residual > cfg.tol_residual; ++it) {
    at.iterations = it + 1;
    std::vector<double> dir;
    std::vector<double> rhs(m);
    for (std::size_t r = 0; r < m; ++r) rhs[r] = -cur.grad[r];
    double slope = 0.0;
    if (solve_dense(cur.hess, rhs, dir)) {
      for (std::size_t r = 0; r < m; ++r) slope += cur.grad[r] * dir[r];
    }
    if (!(slope < 0.0)) {
      dir = rhs;  // steepest descent when the Newton step is unusable
      slope = -norm2(rhs) * norm2(rhs);
    }
    bool accepted = false;
    for (double t = 1.0; t >= 1e-14; t *= 0.5) {
      std::vector<double> trial(m);
      for (std::size_t r = 0; r < m; ++r) trial[r] = lambdas[r] + t * dir[r];
      Potential next = potential(pb, trial);
      if (std::isfinite(next.value) && next.value <= cur.value + 1e-4 * t * slope) {
        lambdas = std::move(trial);
        cur = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double res = raw_residual(pb, lambdas);
    if (res < at.residual) {
      at.residual = res;
      at.lambdas = lambdas;
    }
  }
  return at;
}

// Single-constraint fallback. The residual is non-decreasing in lambda, so a
// sign-change bracket plus bisection converges even where the family has a
// cusp at the cutoff and Newton keeps overshooting.
Attempt bisect(const Problem& pb, const SolverConfig& cfg) {
  auto value = [&pb](double l) -> std::optional<double> {
    const Member mb = evaluate(pb, std::span<const double>(&l, 1));
    if (!admissible(mb)) return std::nullopt;
    return residuals(pb, mb).front();
  };
  Attempt at;
  const std::optional<double> f0 = value(0.0);
  if (!f0) return at;
  if (*f0 == 0.0) return Attempt{{0.0}, 0.0, 0, std::nullopt};
  // walk away from 0 in the direction that raises or lowers the residual,
  // pulling back toward the last admissible point when a step leaves the region
  const double dir = *f0 < 0.0 ? 1.0 : -1.0;
  double inner = 0.0;
  double outer = dir;
  bool bracketed = false;
  for (int k = 0; k < 4 * cfg.max_iter && !bracketed; ++k) {
    const std::optional<double> f = value(outer);
    if (!f) {
      outer = 0.5 * (inner + outer);
    } else if ((*f > 0.0) == (dir > 0.0) || *f == 0.0) {
      bracketed = true;
    } else {
      inner = outer;
      outer *= 2.0;
    }
  }
  if (!bracketed) return at;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const double mid = 0.5 * (inner + outer);
    const std::optional<double> f = value(mid);
    at.iterations = it + 1;
    if (!f) {
      outer = mid;
      continue;
    }
    if (std::abs(*f) < at.residual) {
      at.lambdas = {mid};
      at.residual = std::abs(*f);
    }
    if (at.residual <= cfg.tol_residual || mid == inner || mid == outer) break;
    ((*f > 0.0) == (dir > 0.0) ? outer : inner) = mid;
  }
  return at;
}

// Single constraint, power-law family, with the bracket of state k fixed to
// exp(log_bk). The other brackets follow from
//   1 + t c_i = [(c_k - c_i) + b_k c_i] / c_k,   t = (b_k - 1) / c_k,
// which keeps them accurate when b_k is tiny (1 + t c_k would cancel).
Member anchored(const Problem& pb, std::size_t k, double log_bk) {
  const std::vector<double>& c = pb.centred.front();
  const double d = pb.alpha - pb.beta;
  const double bk = std::exp(log_bk);
  Member out;
  out.log_w.assign(pb.n(), kNegInf);
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (pb.log_prior[i] == kNegInf) continue;
    const double br = i == k ? bk : ((c[k] - c[i]) + bk * c[i]) / c[k];
    if (br > 0.0) {
      out.log_w[i] = pb.log_prior[i] + (i == k ? log_bk : std::log(br)) / d;
    } else if (d > 0.0) {
      out.clamped.push_back(i);
    } else {
      out.blown.push_back(i);
    }
  }
  return out;
}

// Polishes a single-constraint power-law root that sits close to a cutoff,
// where the residual is too steep in lambda for double precision. Bisects on
// ln b_k for the state k with the smallest bracket at `near`.
Attempt refine_near_cutoff(const Problem& pb, double near, const SolverConfig& cfg) {
  Attempt at;
  const std::vector<double>& c = pb.centred.front();
  const double d = pb.alpha - pb.beta;
  std::size_t k = pb.n();
  double smallest = kInf;
  for (std::size_t i = 0; i < pb.n(); ++i) {
    const double br = 1.0 + d * near * c[i];
    if (pb.log_prior[i] != kNegInf && br > 0.0 && br < smallest && c[i] != 0.0) {
      smallest = br;
      k = i;
    }
  }
  if (k == pb.n() || smallest > 1e-3) return at;

  auto value = [&](double u) -> std::optional<double> {
    const Member mb = anchored(pb, k, u);
    if (!admissible(mb)) return std::nullopt;
    return residuals(pb, mb).front();
  };
  double lo = -700.0;  // b_k -> 0+
  double hi = 0.0;     // b_k = 1, lambda = 0
  const auto f_lo = value(lo);
  const auto f_hi = value(hi);
  if (!f_lo || !f_hi || (*f_lo > 0.0) == (*f_hi > 0.0)) return at;
  const bool rising = *f_hi > 0.0;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto f = value(mid);
    at.iterations = it + 1;
    if (!f) break;
    if (std::abs(*f) < at.residual) {
      at.residual = std::abs(*f);
      at.member = anchored(pb, k, mid);
      at.lambdas = {std::expm1(mid) / (d * c[k])};
    }
    if (at.residual <= cfg.tol_residual || mid == lo || mid == hi) break;
    ((*f > 0.0) == rising ? hi : lo) = mid;
  }
  return at;
}

// Power-law family written through the brackets of m+1 anchor states, which
// pin down the affine bracket function up to scale. For every state i,
//   x_i = sum_j w_ij exp(u_j),
// with w_i the barycentric coordinates of (g(i) - G) over the anchors. A
// bracket far below 1 stays exact when its state is an anchor, whereas
// 1 + (a-b) lambda.c cancels to zero once it drops under 1e-16.
struct Anchors {
  std::vector<std::size_t> states;
  std::vector<std::vector<double>> weights;  // weights[i][j]; empty off the support
};

std::optional<Anchors> pick_anchors(const Problem& pb, const std::vector<double>& log_bracket) {
  const std::size_t m = pb.m();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (pb.log_prior[i] != kNegInf) order.push_back(i);
  }
  // The widest bracket fixes the scale. The others go in from the smallest
  // up, since at most m states sit near the cutoff and those are the ones
  // that lose precision; clamped states only when the rank needs them.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (log_bracket[x] == kNegInf) return false;
    return log_bracket[y] == kNegInf || log_bracket[x] < log_bracket[y];
  });
  const auto widest = std::max_element(order.begin(), order.end(),
                                       [&](std::size_t x, std::size_t y) { return log_bracket[x] < log_bracket[y]; });
  if (widest != order.end()) std::rotate(order.begin(), widest, widest + 1);
  // greedy: keep a state when it raises the affine rank of the chosen set
  Anchors an;
  std::vector<std::vector<double>> basis;  // orthonormalized (g(j) - g(first))
  for (std::size_t i : order) {
    if (an.states.size() == m + 1) break;
    if (an.states.empty()) {
      an.states.push_back(i);
      continue;
    }
    std::vector<double> v(m);
    for (std::size_t r = 0; r < m; ++r) v[r] = pb.centred[r][i] - pb.centred[r][an.states.front()];
    const double len = norm2(v);
    for (const auto& e : basis) {
      double dot = 0.0;
      for (std::size_t r = 0; r < m; ++r) dot += e[r] * v[r];
      for (std::size_t r = 0; r < m; ++r) v[r] -= dot * e[r];
    }
    const double rest = norm2(v);
    if (!(rest > 1e-9 * std::max(len, 1.0))) continue;
    for (double& x : v) x /= rest;
    basis.push_back(std::move(v));
    an.states.push_back(i);
  }
  if (an.states.size() != m + 1) return std::nullopt;

  std::vector<std::vector<double>> a(m + 1, std::vector<double>(m + 1, 1.0));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j <= m; ++j) a[r + 1][j] = pb.centred[r][an.states[j]];
  }
  auto coords = [&](std::vector<double> point, std::vector<double>& w) {
    point.insert(point.begin(), 1.0);
    return solve_dense(a, point, w);
  };
  an.weights.resize(pb.n());
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (pb.log_prior[i] == kNegInf) continue;
    std::vector<double> point(m);
    for (std::size_t r = 0; r < m; ++r) point[r] = pb.centred[r][i];
    if (!coords(point, an.weights[i])) return std::nullopt;
  }
  return an;
}

// Member for anchor log-brackets u; anchors are evaluated exactly.
Member anchored_member(const Problem& pb, const Anchors& an, const std::vector<double>& u) {
  const double d = pb.alpha - pb.beta;
  const double top = *std::max_element(u.begin(), u.end());
  Member out;
  out.log_w.assign(pb.n(), kNegInf);
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (pb.log_prior[i] == kNegInf) continue;
    const auto hit = std::find(an.states.begin(), an.states.end(), i);
    double log_x = 0.0;
    if (hit != an.states.end()) {
      log_x = u[static_cast<std::size_t>(hit - an.states.begin())];
    } else {
      double x = 0.0;
      for (std::size_t j = 0; j < u.size(); ++j) x += an.weights[i][j] * std::exp(u[j] - top);
      if (!(x > 0.0)) {
        (d > 0.0 ? out.clamped : out.blown).push_back(i);
        continue;
      }
      log_x = std::log(x) + top;
    }
    out.log_w[i] = pb.log_prior[i] + log_x / d;
  }
  return out;
}

// Multipliers of the affine bracket function fixed by u: with
// x(c) = x0 + theta.c, lambda = theta / ((a-b) x0).
std::vector<double> anchored_lambdas(const Problem& pb, const Anchors& an, const std::vector<double>& u) {
  const std::size_t m = pb.m();
  const double top = *std::max_element(u.begin(), u.end());
  std::vector<std::vector<double>> a(m + 1, std::vector<double>(m + 1, 1.0));
  std::vector<double> x(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::size_t r = 0; r < m; ++r) a[j][r + 1] = pb.centred[r][an.states[j]];
    x[j] = std::exp(u[j] - top);
  }
  std::vector<double> coef;
  if (!solve_dense(a, x, coef) || !(coef[0] > 0.0)) return std::vector<double>(m, 0.0);
  std::vector<double> lambdas(m);
  for (std::size_t r = 0; r < m; ++r) lambdas[r] = coef[r + 1] / ((pb.alpha - pb.beta) * coef[0]);
  return lambdas;
}

// Log-brackets for anchor log-brackets u, -inf off the live set. An anchor
// whose escort weight has underflowed to nothing counts as off the live set.
std::vector<double> anchored_log_brackets(const Problem& pb, const Anchors& an, const std::vector<double>& u) {
  const double d = pb.alpha - pb.beta;
  const Member mb = anchored_member(pb, an, u);
  const double heaviest = *std::max_element(mb.log_w.begin(), mb.log_w.end());
  std::vector<double> out(pb.n(), kNegInf);
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (mb.log_w[i] == kNegInf) continue;
    if (pb.beta * (mb.log_w[i] - heaviest) < -46.0) continue;  // escort share below 1e-20
    out[i] = d * (mb.log_w[i] - pb.log_prior[i]);
  }
  return out;
}

// Newton on the anchor log-brackets, started from `log_bracket`. The anchor
// with the largest bracket is held fixed to remove the scale.
Attempt newton_anchored(const Problem& pb, const std::vector<double>& log_bracket, const SolverConfig& cfg,
                        std::vector<double>& last) {
  const std::size_t m = pb.m();
  Attempt at;
  double widest = kNegInf;
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (pb.log_prior[i] != kNegInf) widest = std::max(widest, log_bracket[i]);
  }
  if (widest == kNegInf) return at;
  const std::optional<Anchors> an = pick_anchors(pb, log_bracket);
  if (!an) return at;

  std::vector<double> u(m + 1);
  std::size_t fixed = 0;
  for (std::size_t j = 0; j <= m; ++j) {
    const double lb = log_bracket[an->states[j]];
    u[j] = lb == kNegInf ? -36.8 : lb - widest;  // clamped anchors start at 1e-16
    if (u[j] > u[fixed]) fixed = j;
  }
  const double shift = u[fixed];
  for (double& v : u) v -= shift;

  auto value = [&](const std::vector<double>& uu) -> std::optional<std::vector<double>> {
    const Member mb = anchored_member(pb, *an, uu);
    if (!admissible(mb)) return std::nullopt;
    return residuals(pb, mb);
  };
  auto record = [&](const std::vector<double>& uu, double res) {
    if (res < at.residual) {
      at.residual = res;
      at.member = anchored_member(pb, *an, uu);
      at.lambdas = anchored_lambdas(pb, *an, uu);
    }
  };
  std::optional<std::vector<double>> f = value(u);
  if (!f) return at;
  record(u, norm_inf(*f));
  for (int it = 0; it < cfg.max_iter && at.residual > cfg.tol_residual; ++it) {
    at.iterations = it + 1;
    std::vector<std::vector<double>> jac(m, std::vector<double>(m, 0.0));
    bool ok = true;
    for (std::size_t c = 0, j = 0; j <= m && ok; ++j) {
      if (j == fixed) continue;
      const double h = 1e-7 * std::max(1.0, std::abs(u[j]));
      std::vector<double> up = u;
      up[j] += h;
      const auto fu = value(up);
      if (!fu) {
        ok = false;
        break;
      }
      for (std::size_t r = 0; r < m; ++r) jac[r][c] = ((*fu)[r] - (*f)[r]) / h;
      ++c;
    }
    std::vector<double> step;
    std::vector<double> rhs(m);
    for (std::size_t r = 0; r < m; ++r) rhs[r] = -(*f)[r];
    if (!ok || !solve_dense(jac, rhs, step)) break;
    const double base = norm2(*f);
    bool moved = false;
    for (double t = 1.0; t >= 1e-10; t *= 0.5) {
      std::vector<double> trial = u;
      for (std::size_t c = 0, j = 0; j <= m; ++j) {
        if (j == fixed) continue;
        trial[j] += t * step[c++];
      }
      const auto ft = value(trial);
      if (ft && norm2(*ft) < base) {
        u = std::move(trial);
        f = ft;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    record(u, norm_inf(*f));
  }
  last = anchored_log_brackets(pb, *an, u);
  return at;
}

// Anchored Newton from `log_bracket`, re-picking the anchors from the current
// brackets whenever a round stalls.
Attempt refine_anchored(const Problem& pb, std::vector<double> log_bracket, const SolverConfig& cfg) {
  Attempt best;
  int iterations = 0;
  for (int round = 0; round < 8 && best.residual > cfg.tol_residual; ++round) {
    std::vector<double> next;
    Attempt at = newton_anchored(pb, log_bracket, cfg, next);
    iterations += at.iterations;
    if (at.residual < best.residual) best = std::move(at);
    if (next.empty() || next == log_bracket) break;
    log_bracket = std::move(next);
  }
  best.iterations = iterations;
  return best;
}

std::vector<double> log_brackets_at(const Problem& pb, std::span<const double> lambdas) {
  const double d = pb.alpha - pb.beta;
  std::vector<double> out(pb.n(), kNegInf);
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (pb.log_prior[i] == kNegInf) continue;
    double s = 0.0;
    for (std::size_t r = 0; r < pb.m(); ++r) s += lambdas[r] * pb.centred[r][i];
    if (d * s > -1.0) out[i] = std::log1p(d * s);
  }
  return out;
}

// The power-law problem in escort coordinates. With e the beta-escort of p,
// w the beta-escort of the prior and k = alpha/beta, the stationary family is
// the KKT system of
//   minimize sum_i w_i (e_i/w_i)^k / (k (k-1))
//   subject to e >= 0, sum_i e_i = 1, sum_i (g_r(i) - G_r) e_i = 0,
// which is strictly convex. Solved with an infeasible-start log-barrier
// Newton method. Returns the log-brackets (k-1) ln(e_i/w_i), -inf where e_i
// sits at the barrier floor.
std::optional<std::vector<double>> escort_barrier(const Problem& pb, const SolverConfig& cfg) {
  const double k = pb.alpha / pb.beta;
  const std::size_t m = pb.m();
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (pb.log_prior[i] != kNegInf) live.push_back(i);
  }
  const std::size_t nl = live.size();
  std::vector<double> lw(nl);
  for (std::size_t j = 0; j < nl; ++j) lw[j] = pb.beta * pb.log_prior[live[j]];
  const double lz = log_sum_exp(lw);
  for (double& v : lw) v -= lz;
  auto a = [&](std::size_t r, std::size_t j) { return r == 0 ? 1.0 : pb.centred[r - 1][live[j]]; };

  std::vector<double> e(nl);
  for (std::size_t j = 0; j < nl; ++j) e[j] = std::exp(lw[j]);
  std::vector<double> nu(m + 1, 0.0);
  std::vector<double> grad(nl);
  std::vector<double> hess(nl);

  // KKT residual norm at (e, nu), relative to the size of the objective
  // gradient; fills the barrier gradient and Hessian.
  auto kkt = [&](const std::vector<double>& ee, const std::vector<double>& nn, double tau) -> double {
    double sq = 0.0;
    double scale = 1.0;
    for (std::size_t j = 0; j < nl; ++j) {
      const double r = std::log(ee[j]) - lw[j];
      const double fp = std::exp((k - 1.0) * r) / (k - 1.0);
      scale = std::max(scale, std::abs(fp));
      grad[j] = fp - tau / ee[j];
      hess[j] = std::exp((k - 2.0) * r - lw[j]) + tau / (ee[j] * ee[j]);
      double dual = grad[j];
      for (std::size_t r2 = 0; r2 <= m; ++r2) dual += nn[r2] * a(r2, j);
      sq += dual * dual;
    }
    for (std::size_t r = 0; r <= m; ++r) {
      double primal = r == 0 ? -1.0 : 0.0;
      for (std::size_t j = 0; j < nl; ++j) primal += a(r, j) * ee[j];
      sq += primal * primal;
    }
    return std::isfinite(sq) ? std::sqrt(sq) / scale : kInf;
  };

  auto barrier = [&](const std::vector<double>& ee, double tau) {
    double f = 0.0;
    for (std::size_t j = 0; j < nl; ++j) {
      f += std::exp(lw[j] + k * (std::log(ee[j]) - lw[j])) / (k * (k - 1.0)) - tau * std::log(ee[j]);
    }
    return f;
  };

  // tau runs down to where the barrier pull tau/e_i is negligible for any
  // escort share that still matters; stalls keep the current iterate.
  bool stalled = false;
  for (double tau = 1.0; tau >= 1e-15 && !stalled; tau *= 0.1) {
    const double tol = tau > 1e-14 ? 1e-9 : 1e-13;
    for (int it = 0; it < cfg.max_iter; ++it) {
      const double res = kkt(e, nu, tau);
      if (!std::isfinite(res)) return std::nullopt;
      if (res <= tol) break;
      // Schur complement of the diagonal block: (A H^-1 A^T) nu+ = r_p - A H^-1 grad
      std::vector<std::vector<double>> s(m + 1, std::vector<double>(m + 1, 0.0));
      std::vector<double> rhs(m + 1, 0.0);
      std::vector<double> rhs_primal(m + 1, 0.0);
      for (std::size_t r = 0; r <= m; ++r) {
        double primal = r == 0 ? -1.0 : 0.0;
        for (std::size_t j = 0; j < nl; ++j) {
          primal += a(r, j) * e[j];
          rhs[r] -= a(r, j) * grad[j] / hess[j];
          for (std::size_t c = 0; c <= m; ++c) s[r][c] += a(r, j) * a(c, j) / hess[j];
        }
        rhs[r] += primal;
        rhs_primal[r] = primal;
      }
      std::vector<double> nu_plus;
      if (!solve_dense(s, rhs, nu_plus)) {
        stalled = true;
        break;
      }
      std::vector<double> de(nl);
      double t = 1.0;
      for (std::size_t j = 0; j < nl; ++j) {
        double v = grad[j];
        for (std::size_t r = 0; r <= m; ++r) v += a(r, j) * nu_plus[r];
        de[j] = -v / hess[j];
        if (de[j] < 0.0) t = std::min(t, -0.99 * e[j] / de[j]);
      }
      // Once the equalities hold the direction stays in their null space and
      // is a descent direction for the barrier objective, which makes a
      // better merit than the badly scaled KKT norm.
      double infeasible = 0.0;
      for (std::size_t r = 0; r <= m; ++r) infeasible = std::max(infeasible, std::abs(rhs_primal[r]));
      const bool feasible = infeasible <= 1e-13;
      double slope = 0.0;
      for (std::size_t j = 0; j < nl; ++j) slope += grad[j] * de[j];
      const double f0 = barrier(e, tau);
      bool accepted = false;
      for (; t >= 1e-14; t *= 0.5) {
        std::vector<double> te(nl);
        std::vector<double> tn(m + 1);
        for (std::size_t j = 0; j < nl; ++j) te[j] = e[j] + t * de[j];
        for (std::size_t r = 0; r <= m; ++r) tn[r] = nu[r] + t * (nu_plus[r] - nu[r]);
        const bool ok = feasible && slope < 0.0 ? barrier(te, tau) <= f0 + 1e-4 * t * slope
                                                : kkt(te, tn, tau) <= (1.0 - 0.01 * t) * res;
        if (ok) {
          e = std::move(te);
          nu = std::move(tn);
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
  }

  std::vector<double> out(pb.n(), kNegInf);
  for (std::size_t j = 0; j < nl; ++j) {
    if (e[j] > 1e-11) out[live[j]] = (k - 1.0) * (std::log(e[j]) - lw[j]);
  }
  return out;
}

// Uniform in [-1, 1] from 53 random bits; avoids the implementation-defined
// std distributions so multi-starts are reproducible across toolchains.
double symmetric_unit(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

Problem make_problem(const WeightVector& prior, const ConstraintSet& cs, const EntropyParams& params) {
  Problem pb;
  pb.alpha = params.alpha();
  pb.beta = params.beta();
  pb.exponential = params.equal_orders();
  pb.log_prior.assign(prior.size(), kNegInf);
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (prior[i] > 0.0) pb.log_prior[i] = std::log(prior[i]);
  }
  pb.centred.resize(cs.count());
  for (std::size_t r = 0; r < cs.count(); ++r) {
    auto g = cs.g(r);
    pb.centred[r].assign(g.begin(), g.end());
    for (double& v : pb.centred[r]) v -= cs.target(r);
  }
  return pb;
}

MaxEntSolution package(const Problem& pb, const ConstraintSet& cs, const Attempt& at, SolverReport report) {
  const std::vector<double>& lambdas = at.lambdas;
  Member mb = at.member ? *at.member : evaluate(pb, lambdas);
  const double log_z = log_sum_exp(mb.log_w);
  std::vector<double> p(pb.n(), 0.0);
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (mb.log_w[i] != kNegInf) p[i] = std::exp(mb.log_w[i] - log_z);
  }
  WeightVector pv(std::move(p));
  double worst = 0.0;
  for (std::size_t r = 0; r < cs.count(); ++r) {
    worst = std::max(worst, std::abs(normalized_q_expectation(pv, cs.g(r), pb.beta) - cs.target(r)));
  }
  report.final_residual_norm = worst;
  report.clamped_states = mb.clamped;
  return MaxEntSolution{std::move(pv), lambdas, std::exp(log_z),
                        pb.exponential ? Branch::exponential : Branch::power_law, std::move(report)};
}

struct Search {
  Attempt best;
  int restarts_used = 0;
};

// Newton with restarts, then the fallbacks in order of cost.
Search search(const Problem& pb, const SolverConfig& cfg) {
  // Restart draws are scaled so that lambda_r (g_r - G_r) spans O(1).
  std::vector<double> spread(pb.m(), 1.0);
  for (std::size_t r = 0; r < pb.m(); ++r) {
    double lo = kInf;
    double hi = -kInf;
    for (std::size_t i = 0; i < pb.n(); ++i) {
      if (pb.log_prior[i] == kNegInf) continue;
      lo = std::min(lo, pb.centred[r][i]);
      hi = std::max(hi, pb.centred[r][i]);
    }
    spread[r] = 2.0 / (hi - lo);
  }

  std::mt19937_64 rng(cfg.seed);
  Attempt best;
  int total_iterations = 0;
  int restarts_used = 0;
  for (int attempt = 0; attempt <= cfg.restarts; ++attempt) {
    std::vector<double> start(pb.m(), 0.0);
    if (attempt > 0) {
      ++restarts_used;
      for (std::size_t r = 0; r < pb.m(); ++r) start[r] = spread[r] * symmetric_unit(rng);
      for (int shrink = 0; shrink < 60 && !residual_at(pb, start); ++shrink) {
        for (double& v : start) v *= 0.5;
      }
    }
    Attempt at = newton(pb, start, cfg);
    total_iterations += at.iterations;
    if (at.residual < best.residual) {
      best = at;
      best.iterations = at.iterations;
    }
    if (best.residual <= cfg.tol_residual) break;
  }
  if (best.residual > cfg.tol_residual) {
    Attempt at = descend(pb, std::vector<double>(pb.m(), 0.0), cfg);
    total_iterations += at.iterations;
    if (at.residual < best.residual) best = at;
    if (at.residual > cfg.tol_residual && !at.lambdas.empty()) {
      Attempt polished = newton(pb, at.lambdas, cfg);
      total_iterations += polished.iterations;
      if (polished.residual < best.residual) best = polished;
    }
  }
  if (pb.m() == 1 && best.residual > cfg.tol_residual) {
    Attempt at = bisect(pb, cfg);
    total_iterations += at.iterations;
    if (at.residual < best.residual) best = at;
  }
  if (pb.m() == 1 && !pb.exponential && best.residual > cfg.tol_residual && !best.lambdas.empty()) {
    Attempt at = refine_near_cutoff(pb, best.lambdas.front(), cfg);
    total_iterations += at.iterations;
    if (at.residual < best.residual) best = at;
  }

  if (!pb.exponential && best.residual > cfg.tol_residual && !best.lambdas.empty()) {
    Attempt at = refine_anchored(pb, log_brackets_at(pb, best.lambdas), cfg);
    total_iterations += at.iterations;
    if (at.residual < best.residual) best = at;
  }
  if (!pb.exponential && best.residual > cfg.tol_residual) {
    if (const auto start = escort_barrier(pb, cfg)) {
      Attempt at = refine_anchored(pb, *start, cfg);
      total_iterations += at.iterations;
      if (at.residual < best.residual) best = at;
    }
  }

  return {best, restarts_used};
}

// Log-brackets of the member an attempt describes, -inf off the live set.
std::vector<double> member_log_brackets(const Problem& pb, const Attempt& at) {
  const Member mb = at.member ? *at.member : evaluate(pb, at.lambdas);
  const double d = pb.alpha - pb.beta;
  std::vector<double> out(pb.n(), kNegInf);
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (mb.log_w[i] != kNegInf) out[i] = d * (mb.log_w[i] - pb.log_prior[i]);
  }
  return out;
}

// For alpha > beta. Large alpha/beta flattens the objective and pushes
// brackets far below double resolution, so the solution is followed from
// alpha/beta = 2 up to the target. Each step holds the escort fixed, which
// scales the log-brackets by the ratio of the (alpha/beta - 1) values, and
// re-solves with the anchored Newton.
Attempt continuation(const Problem& pb, const SolverConfig& cfg) {
  const double target = pb.alpha / pb.beta;
  if (!(target > 2.0)) return {};
  Problem cur = pb;
  cur.alpha = 2.0 * pb.beta;
  double k = 2.0;
  Attempt at = search(cur, cfg).best;
  if (at.residual > cfg.tol_residual || at.lambdas.empty()) return {};
  double factor = 1.25;
  for (int step = 0; step < 4 * cfg.max_iter && k < target; ++step) {
    const double next = std::min(target, k * factor);
    Problem trial = pb;
    if (next < target) trial.alpha = next * pb.beta;
    std::vector<double> start = member_log_brackets(cur, at);
    for (double& v : start) {
      if (v != kNegInf) v *= (next - 1.0) / (k - 1.0);
    }
    Attempt moved = refine_anchored(trial, start, cfg);
    if (moved.residual <= cfg.tol_residual) {
      k = next;
      cur = trial;
      at = std::move(moved);
      factor = std::min(2.0 * factor - 1.0, 2.0);
    } else {
      factor = 1.0 + 0.5 * (factor - 1.0);
      if (factor < 1.001) return {};
    }
  }
  return k < target ? Attempt{} : at;
}

MaxEntSolution solve(const WeightVector& prior, const ConstraintSet& cs, const EntropyParams& params,
                     const SolverConfig& cfg) {
  cfg.validate();
  if (std::abs(cs.q_index() - params.beta()) > eps_order) {
    throw InvalidArgument(fmt::format("constraint q index {} must equal beta = {}", cs.q_index(), params.beta()));
  }
  if (cs.count() > 0 && cs.states() != prior.size()) {
    throw InvalidArgument(
        fmt::format("constraints are tabulated on {} states but the problem has {}", cs.states(), prior.size()));
  }
  std::vector<bool> support(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) support[i] = prior[i] > 0.0;
  cs.check_feasible(support);

  const Problem pb = make_problem(prior, cs, params);
  if (pb.m() == 0) {
    SolverReport rep;
    rep.converged = true;
    return MaxEntSolution{prior.normalized(), {}, prior.mass(),
                          pb.exponential ? Branch::exponential : Branch::power_law, rep};
  }

  auto [best, restarts_used] = search(pb, cfg);
  if (!pb.exponential && pb.alpha > pb.beta && best.residual > cfg.tol_residual) {
    Attempt at = continuation(pb, cfg);
    if (at.residual < best.residual) best = at;
  }

  SolverReport rep;
  rep.iterations = best.iterations;
  rep.restarts_used = restarts_used;
  if (best.lambdas.empty()) {
    // No attempt ever reached an admissible point; only possible for alpha < beta.
    Member mb = evaluate(pb, std::vector<double>(pb.m(), 0.0));
    throw DomainError("no admissible multipliers found; the power-law bracket is non-positive", mb.blown);
  }
  MaxEntSolution sol = package(pb, cs, best, rep);
  sol.report.converged = sol.report.final_residual_norm <= cfg.tol_residual;
  if (!sol.report.converged) throw NotConverged(std::move(sol));
  return sol;
}

}  // namespace

ConstraintSet::ConstraintSet(double q_index) : q_index_(q_index) {
  if (!(q_index > 0.0) || !std::isfinite(q_index)) {
    throw InvalidArgument(fmt::format("q index must be a finite positive real, got {}", q_index));
  }
}

ConstraintSet::ConstraintSet(std::vector<std::vector<double>> g, std::vector<double> targets, double q_index)
    : g_(std::move(g)), targets_(std::move(targets)), q_index_(q_index) {
  if (!(q_index > 0.0) || !std::isfinite(q_index)) {
    throw InvalidArgument(fmt::format("q index must be a finite positive real, got {}", q_index));
  }
  if (g_.size() != targets_.size()) {
    throw InvalidArgument(fmt::format("{} constraint functions but {} targets", g_.size(), targets_.size()));
  }
  for (std::size_t r = 0; r < g_.size(); ++r) {
    if (g_[r].empty() || g_[r].size() != g_.front().size()) {
      throw InvalidArgument(fmt::format("constraint {} has {} states, expected {}", r, g_[r].size(),
                                        g_.front().size()));
    }
    for (double v : g_[r]) {
      if (!std::isfinite(v)) throw InvalidArgument(fmt::format("constraint {} has a non-finite value", r));
    }
    if (!std::isfinite(targets_[r])) throw InvalidArgument(fmt::format("target {} is not finite", r));
  }
  check_feasible(std::vector<bool>(states(), true));
}

void ConstraintSet::check_feasible(const std::vector<bool>& support) const {
  for (std::size_t r = 0; r < g_.size(); ++r) {
    double lo = kInf;
    double hi = -kInf;
    for (std::size_t i = 0; i < g_[r].size() && i < support.size(); ++i) {
      if (!support[i]) continue;
      lo = std::min(lo, g_[r][i]);
      hi = std::max(hi, g_[r][i]);
    }
    if (!(hi > lo)) {
      throw DegenerateConstraint(fmt::format("constraint {} is constant on the support", r), r);
    }
    if (!(targets_[r] > lo && targets_[r] < hi)) {
      throw Infeasible(fmt::format("target G_{} = {} is not strictly inside ({}, {})", r, targets_[r], lo, hi));
    }
  }
}

void SolverConfig::validate() const {
  if (!(tol_residual > 0.0) || !(damping > 0.0) || !(fd_step > 0.0) || max_iter < 1 || restarts < 0) {
    throw InvalidArgument("solver config needs positive tolerances and step sizes, max_iter >= 1, restarts >= 0");
  }
}

const char* to_string(Branch b) noexcept { return b == Branch::exponential ? "exponential" : "power_law"; }

NotConverged::NotConverged(MaxEntSolution best)
    : Error(fmt::format("solver did not converge: residual {:.3e} after {} restarts", best.report.final_residual_norm,
                        best.report.restarts_used)),
      best_(std::move(best)) {}

double normalized_q_expectation(const WeightVector& p, std::span<const double> g, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw InvalidArgument(fmt::format("q must be positive, got {}", q));
  if (g.size() != p.size()) {
    throw InvalidArgument(fmt::format("g has {} entries but P has {}", g.size(), p.size()));
  }
  double m = kNegInf;
  for (double v : p) {
    if (v > 0.0) m = std::max(m, std::log(v));
  }
  double s = 0.0;
  double t = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    const double w = std::exp(q * (std::log(p[i]) - m));
    s += w;
    t += w * g[i];
  }
  return t / s;
}

FamilyMember stationary_family(const WeightVector& prior, const ConstraintSet& constraints,
                               const EntropyParams& params, std::span<const double> lambdas) {
  if (lambdas.size() != constraints.count()) {
    throw InvalidArgument(fmt::format("{} multipliers for {} constraints", lambdas.size(), constraints.count()));
  }
  if (constraints.count() > 0 && constraints.states() != prior.size()) {
    throw InvalidArgument("constraints and prior disagree on the number of states");
  }
  const Problem pb = make_problem(prior, constraints, params);
  Member mb = evaluate(pb, lambdas);
  if (!mb.blown.empty()) {
    throw DomainError(fmt::format("power-law bracket is non-positive at states {} with alpha < beta",
                                  fmt::join(mb.blown, ",")),
                      mb.blown);
  }
  if (!admissible(mb)) throw DomainError("every state is cut off at these multipliers", mb.clamped);
  const double log_z = log_sum_exp(mb.log_w);
  std::vector<double> p(pb.n(), 0.0);
  for (std::size_t i = 0; i < pb.n(); ++i) {
    if (mb.log_w[i] != kNegInf) p[i] = std::exp(mb.log_w[i] - log_z);
  }
  return FamilyMember{WeightVector(std::move(p)), std::exp(log_z), std::move(mb.clamped)};
}

MaxEntSolution solve_maxent(std::size_t n, const ConstraintSet& constraints, const EntropyParams& params,
                            const SolverConfig& cfg) {
  if (n == 0) throw InvalidArgument("solve_maxent needs at least one state");
  return solve(WeightVector(std::vector<double>(n, 1.0)), constraints, params, cfg);
}

MaxEntSolution solve_minxent(const WeightVector& prior, const ConstraintSet& constraints,
                             const EntropyParams& params, const SolverConfig& cfg) {
  return solve(prior, constraints, params, cfg);
}

}  // namespace lne

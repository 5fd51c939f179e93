#include "lne/qdeform.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lne/errors.hpp"
#include "lne/numkit.hpp"

namespace lne {

DeformationIndex::DeformationIndex(double q) : q_(q) {
  if (!std::isfinite(q)) throw InvalidArgument(fmt::format("deformation index must be finite, got {}", q));
}

bool DeformationIndex::is_classical() const noexcept { return std::abs(1.0 - q_) <= eps_order; }

double q_log(double x, DeformationIndex q) {
  if (!(x > 0.0)) throw InvalidArgument(fmt::format("q_log needs x > 0, got {}", x));
  if (q.is_classical()) return std::log(x);
  const double k = 1.0 - q.q();
  return std::expm1(k * std::log(x)) / k;
}

double q_exp(double x, DeformationIndex q) {
  if (q.is_classical()) return std::exp(x);
  const double k = 1.0 - q.q();
  const double kx = k * x;
  if (kx < -1.0) return 0.0;
  if (kx == -1.0) {
    if (k > 0.0) return 0.0;
    throw DomainError(fmt::format("q_exp: bracket vanishes at x = {} with q = {} (pole)", x, q.q()), {});
  }
  return std::exp(std::log1p(kx) / k);
}

}  // namespace lne

#include "cbtail/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "cbtail/errors.hpp"

namespace cbtail {

bool TuningPlan::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::vector<std::string> TuningPlan::warnings() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.pass) {
      out.push_back(fmt::format("{} fails at n={}: {} ({:.6g} vs {:.6g})", c.name, n,
                                c.relation, c.lhs, c.rhs));
    }
  }
  return out;
}

std::size_t floor_power(std::size_t n, double e) {
  const double target = e * std::log(static_cast<double>(n));
  auto r = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), e)));
  // r^(1/e) <= n  <=>  log r <= e log n; tolerate one ulp-scale miss.
  const double slack = 1e-12 * std::max(1.0, std::abs(target));
  while (std::log(static_cast<double>(r + 1)) <= target + slack) ++r;
  while (r > 0 && std::log(static_cast<double>(r)) > target + slack) --r;
  return r;
}

double alpha_upper_bound(double rho) { return 2.0 * rho / (1.0 + 2.0 * rho); }

double beta_lower_bound(double alpha) { return std::max(1.0 - alpha / 2.0, 0.25); }

TuningPlan plan(std::size_t n, double alpha, double beta, double rho) {
  if (n < 4) throw DomainError(fmt::format("tuning needs n >= 4, got {}", n));
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(rho)) {
    throw DomainError("tuning exponents must be finite");
  }
  if (!(rho > 0.0)) throw DomainError(fmt::format("rho must be > 0, got {}", rho));
  const double amax = alpha_upper_bound(rho);
  if (!(alpha > 0.0 && alpha < amax)) {
    throw InfeasibleTuningError(fmt::format(
        "alpha = {} violates 0 < alpha < 2rho/(1+2rho) = {:.6g} (rho = {})", alpha, amax, rho));
  }
  const double bmin = beta_lower_bound(alpha);
  if (!(beta > bmin)) {
    throw InfeasibleTuningError(fmt::format(
        "beta = {} violates beta > max(1 - alpha/2, 1/4) = {:.6g} (alpha = {})", beta, bmin,
        alpha));
  }

  TuningPlan p;
  p.n = n;
  p.alpha = alpha;
  p.beta = beta;
  p.rho = rho;
  p.k = floor_power(n, alpha);
  if (p.k < 2) {
    throw InfeasibleTuningError(
        fmt::format("k = floor(n^alpha) = {} < 2 at n = {}, alpha = {}", p.k, n, alpha));
  }
  const std::size_t m = floor_power(n, beta);
  if (m > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    throw InfeasibleTuningError(fmt::format("m = floor(n^beta) = {} is too large", m));
  }
  p.m = static_cast<int>(m);

  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(p.k);
  const double dm = static_cast<double>(p.m);
  const double log_n = std::log(dn);
  auto add = [&](std::string name, std::string relation, double lhs, double rhs) {
    p.checks.push_back({std::move(name), std::move(relation), lhs, rhs, lhs < rhs});
  };
  add("intermediate", "k < n", dk, dn);
  add("resolution", "n/sqrt(k) < m", dn / std::sqrt(dk), dm);
  add("bias", "sqrt(n) < m^2", std::sqrt(dn), dm * dm);
  add("effective-size", "(log n)^2 < k", log_n * log_n, dk);
  return p;
}

}  // namespace cbtail

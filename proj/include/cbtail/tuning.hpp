#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cbtail {

// One finite-n proxy of an asymptotic rate condition: lhs < rhs.
struct TuningCheck {
  std::string name;
  std::string relation;  // human-readable form, e.g. "n/sqrt(k) < m"
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

// k = ⌊n^alpha⌋ tail order statistics and checkerboard resolution
// m = ⌊n^beta⌋, admissible when 0 < alpha < 2 rho / (1 + 2 rho) and
// beta > max(1 - alpha/2, 1/4). rho is the second-order exponent of the
// tail approximation, supplied by the user.
struct TuningPlan {
  std::size_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 1.0;
  std::size_t k = 0;
  int m = 0;
  std::vector<TuningCheck> checks;

  bool all_pass() const;
  // Names of the failed checks; finite-n violations are warnings only.
  std::vector<std::string> warnings() const;
};

// ⌊n^e⌋, robust to pow() landing just below an exact integer power.
std::size_t floor_power(std::size_t n, double e);

// Throws DomainError for n < 4 or non-finite inputs, InfeasibleTuningError
// when the exponents violate the inequalities above or k < 2.
TuningPlan plan(std::size_t n, double alpha, double beta, double rho = 1.0);

// Largest admissible alpha for a given rho, 2 rho / (1 + 2 rho).
double alpha_upper_bound(double rho);
// Smallest admissible beta (exclusive) for a given alpha.
double beta_lower_bound(double alpha);

}  // namespace cbtail

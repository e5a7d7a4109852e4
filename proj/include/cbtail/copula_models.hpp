#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>

#include "cbtail/empirical_copula.hpp"
#include "cbtail/rng.hpp"

namespace cbtail {

enum class TailSide { Lower, Upper };

struct Independence {};
struct Comonotone {};
struct Clayton {
  double theta;
};
struct GaussianCopula {
  double rho;
};
struct StudentT {
  double rho;
  double nu;
};

// Immutable parametric copula. Construct through the factories, which
// validate parameters (Clayton theta > 0, |rho| < 1, nu > 0).
class CopulaModel {
 public:
  using Kind = std::variant<Independence, Comonotone, Clayton, GaussianCopula, StudentT>;

  static CopulaModel independence();
  static CopulaModel comonotone();
  static CopulaModel clayton(double theta);
  static CopulaModel gaussian(double rho);
  static CopulaModel student_t(double rho, double nu);

  const Kind& kind() const { return kind_; }
  // Short family name: "independence", "comonotone", "clayton", ...
  std::string family() const;
  // Family plus parameters, e.g. "clayton(theta=1)".
  std::string describe() const;

 private:
  explicit CopulaModel(Kind k) : kind_(k) {}
  Kind kind_;
};

// C(u, v). Gaussian and Student-t are evaluated by one-dimensional
// quadrature over the conditional law of the second latent coordinate.
double copula_cdf(const CopulaModel& model, double u, double v);

// Monotone map applied to each uniform margin after sampling. Estimators
// are rank based, so any strictly increasing map leaves them unchanged.
using MarginalTransform = std::function<double(double)>;

// n i.i.d. pairs with copula `model` and uniform(0,1) margins unless
// transforms are given. Clayton uses conditional inversion; Gaussian and
// Student-t map a latent normal / t pair through its marginal CDFs.
BivariateSample sample(const CopulaModel& model, std::size_t n, Engine& rng,
                       const MarginalTransform& fx = {},
                       const MarginalTransform& fy = {});

// Λ_L(x, y) = lim_{t↓0} C(tx, ty) / t.
double lower_tail_copula(const CopulaModel& model, double x, double y);
// Λ_U(x, y) = lim_{t↓0} (xt + yt - 1 + C(1 - xt, 1 - yt)) / t.
double upper_tail_copula(const CopulaModel& model, double x, double y);

// Relative accuracy demanded of the numerical tail limit.
inline constexpr double kTailLimitTolerance = 1e-4;

// Limit of ratio(t) as t ↓ 0 from its values at t = 1e-3, ..., 1e-11,
// accelerated with Wynn's epsilon algorithm (exact for sums of geometric
// error terms, i.e. errors ~ Σ c_j t^{p_j}). Throws ExtrapolationError when
// the last two accelerated estimates differ by more than the tolerance.
double extrapolate_tail_limit(const std::function<double(double)>& ratio);

// The extrapolated limit of C(tx, ty)/t regardless of closed forms. Used for
// Student-t and to cross-check the closed forms. Gaussian copulas with
// rho > 0 converge too slowly and raise ExtrapolationError here.
double numerical_lower_tail_copula(const CopulaModel& model, double x, double y);

// Ground truth for tail-dependence experiments.
struct TailOracle {
  double lambda = 0.0;    // Λ(1, 1)
  double d_dx = 0.0;      // ∂Λ/∂x at (1, 1)
  double d_dy = 0.0;      // ∂Λ/∂y at (1, 1)
  double sigma2 = 0.0;    // asymptotic variance of √k (λ̂ - λ)
};

// σ² = λ + Λ_x² + Λ_y² + 2 λ [(Λ_x - 1)(Λ_y - 1) - 1].
double tail_asymptotic_variance(double lambda, double d_dx, double d_dy);

// Oracle for the given tail. All supported models are exchangeable, so the
// partials follow from Euler's identity Λ_x + Λ_y = Λ(1,1) where no closed
// form is used. Comonotone takes the symmetric value 1/2 at its kink.
TailOracle tail_oracle(const CopulaModel& model, TailSide side = TailSide::Lower);

}  // namespace cbtail

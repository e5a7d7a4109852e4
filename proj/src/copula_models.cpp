#include "cbtail/copula_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <fmt/format.h>

#include "cbtail/errors.hpp"

namespace cbtail {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_correlation(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) {
    throw DomainError(fmt::format("correlation must lie in (-1, 1), got {}", rho));
  }
}

void check_unit(double u, const char* name) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError(fmt::format("{} must lie in [0, 1], got {}", name, u));
  }
}

void check_nonnegative(double x, const char* name) {
  if (!(x >= 0.0) || std::isinf(x)) {
    throw DomainError(fmt::format("{} must be finite and >= 0, got {}", name, x));
  }
}

double clayton_cdf(double theta, double u, double v) {
  if (u == 0.0 || v == 0.0) return 0.0;
  const double s = std::pow(u, -theta) + std::pow(v, -theta) - 1.0;
  return std::pow(s, -1.0 / theta);
}

// P(X <= a, Y <= b) for a latent elliptical pair, integrating the marginal
// density of X against the conditional CDF of Y given X = x over (-inf, a].
// The integral is written as s = a - x in [0, inf) for exp-sinh quadrature.
template <class Density, class Conditional>
double latent_cdf(double a, const Density& density, const Conditional& conditional) {
  thread_local boost::math::quadrature::exp_sinh<double> integrator;
  auto integrand = [&](double s) {
    const double x = a - s;
    const double f = density(x);
    if (f == 0.0) return 0.0;
    return f * conditional(x);
  };
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-13, &error, &l1);
  return value;
}

double gaussian_cdf(double rho, double u, double v) {
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  // Integrate over the coordinate with the smaller probability.
  if (v < u) std::swap(u, v);
  static const boost::math::normal_distribution<double> z;
  const double a = boost::math::quantile(z, u);
  const double b = boost::math::quantile(z, v);
  const double s = std::sqrt(1.0 - rho * rho);
  const double value = latent_cdf(
      a, [](double x) { return boost::math::pdf(z, x); },
      [&](double x) { return boost::math::cdf(z, (b - rho * x) / s); });
  return std::clamp(value, 0.0, std::min(u, v));
}

double student_t_cdf(double rho, double nu, double u, double v) {
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  if (v < u) std::swap(u, v);
  const boost::math::students_t_distribution<double> t(nu);
  const boost::math::students_t_distribution<double> t1(nu + 1.0);
  const double a = boost::math::quantile(t, u);
  const double b = boost::math::quantile(t, v);
  const double r2 = 1.0 - rho * rho;
  const double value = latent_cdf(
      a, [&](double x) { return boost::math::pdf(t, x); },
      [&](double x) {
        const double scale = std::sqrt((nu + x * x) * r2 / (nu + 1.0));
        return boost::math::cdf(t1, (b - rho * x) / scale);
      });
  return std::clamp(value, 0.0, std::min(u, v));
}

}  // namespace

CopulaModel CopulaModel::independence() { return CopulaModel(Independence{}); }

CopulaModel CopulaModel::comonotone() { return CopulaModel(Comonotone{}); }

CopulaModel CopulaModel::clayton(double theta) {
  if (!(theta > 0.0) || std::isinf(theta)) {
    throw DomainError(fmt::format("Clayton theta must be > 0, got {}", theta));
  }
  return CopulaModel(Clayton{theta});
}

CopulaModel CopulaModel::gaussian(double rho) {
  check_correlation(rho);
  return CopulaModel(GaussianCopula{rho});
}

CopulaModel CopulaModel::student_t(double rho, double nu) {
  check_correlation(rho);
  if (!(nu > 0.0) || std::isinf(nu)) {
    throw DomainError(fmt::format("Student-t nu must be > 0, got {}", nu));
  }
  return CopulaModel(StudentT{rho, nu});
}

std::string CopulaModel::family() const {
  return std::visit(Overloaded{
                        [](const Independence&) { return std::string("independence"); },
                        [](const Comonotone&) { return std::string("comonotone"); },
                        [](const Clayton&) { return std::string("clayton"); },
                        [](const GaussianCopula&) { return std::string("gaussian"); },
                        [](const StudentT&) { return std::string("student_t"); },
                    },
                    kind_);
}

std::string CopulaModel::describe() const {
  return std::visit(
      Overloaded{
          [](const Independence&) { return std::string("independence"); },
          [](const Comonotone&) { return std::string("comonotone"); },
          [](const Clayton& c) { return fmt::format("clayton(theta={})", c.theta); },
          [](const GaussianCopula& g) { return fmt::format("gaussian(rho={})", g.rho); },
          [](const StudentT& t) {
            return fmt::format("student_t(rho={};nu={})", t.rho, t.nu);
          },
      },
      kind_);
}

double copula_cdf(const CopulaModel& model, double u, double v) {
  check_unit(u, "u");
  check_unit(v, "v");
  return std::visit(
      Overloaded{
          [&](const Independence&) { return u * v; },
          [&](const Comonotone&) { return std::min(u, v); },
          [&](const Clayton& c) { return clayton_cdf(c.theta, u, v); },
          [&](const GaussianCopula& g) { return gaussian_cdf(g.rho, u, v); },
          [&](const StudentT& t) { return student_t_cdf(t.rho, t.nu, u, v); },
      },
      model.kind());
}

BivariateSample sample(const CopulaModel& model, std::size_t n, Engine& rng,
                       const MarginalTransform& fx, const MarginalTransform& fy) {
  if (n < 1) throw DomainError("sample size must be >= 1");
  BivariateSample out;
  out.xs.resize(n);
  out.ys.resize(n);
  std::normal_distribution<double> normal;

  std::visit(
      Overloaded{
          [&](const Independence&) {
            for (std::size_t i = 0; i < n; ++i) {
              out.xs[i] = uniform_open(rng);
              out.ys[i] = uniform_open(rng);
            }
          },
          [&](const Comonotone&) {
            for (std::size_t i = 0; i < n; ++i) {
              out.xs[i] = out.ys[i] = uniform_open(rng);
            }
          },
          [&](const Clayton& c) {
            // V | U = u is inverted in closed form from
            // ∂C/∂u = (1 + u^θ (v^{-θ} - 1))^{-(1+θ)/θ}.
            const double th = c.theta;
            for (std::size_t i = 0; i < n; ++i) {
              const double u = uniform_open(rng);
              const double w = uniform_open(rng);
              const double s = std::pow(u, -th) * (std::pow(w, -th / (1.0 + th)) - 1.0) + 1.0;
              out.xs[i] = u;
              out.ys[i] = std::pow(s, -1.0 / th);
            }
          },
          [&](const GaussianCopula& g) {
            static const boost::math::normal_distribution<double> z;
            const double s = std::sqrt(1.0 - g.rho * g.rho);
            for (std::size_t i = 0; i < n; ++i) {
              const double z1 = normal(rng);
              const double z2 = g.rho * z1 + s * normal(rng);
              out.xs[i] = boost::math::cdf(z, z1);
              out.ys[i] = boost::math::cdf(z, z2);
            }
          },
          [&](const StudentT& t) {
            const boost::math::students_t_distribution<double> dist(t.nu);
            std::gamma_distribution<double> chi2(t.nu / 2.0, 2.0);
            const double s = std::sqrt(1.0 - t.rho * t.rho);
            for (std::size_t i = 0; i < n; ++i) {
              const double z1 = normal(rng);
              const double z2 = t.rho * z1 + s * normal(rng);
              const double scale = std::sqrt(chi2(rng) / t.nu);
              out.xs[i] = boost::math::cdf(dist, z1 / scale);
              out.ys[i] = boost::math::cdf(dist, z2 / scale);
            }
          },
      },
      model.kind());

  if (fx) std::transform(out.xs.begin(), out.xs.end(), out.xs.begin(), fx);
  if (fy) std::transform(out.ys.begin(), out.ys.end(), out.ys.begin(), fy);
  return out;
}

double extrapolate_tail_limit(const std::function<double(double)>& ratio) {
  constexpr int kFirst = 3;
  constexpr int kPoints = 9;
  std::vector<double> seq(kPoints);
  for (int k = 0; k < kPoints; ++k) seq[k] = ratio(std::pow(10.0, -(kFirst + k)));

  // Wynn's epsilon table, one column at a time. Even columns hold the
  // Shanks estimates; the last entry of each is the best one available.
  std::vector<double> estimates{seq.back()};
  std::vector<double> prev(kPoints, 0.0);
  std::vector<double> cur = seq;
  for (int col = 1; col < kPoints; ++col) {
    std::vector<double> next(cur.size() - 1);
    bool settled = false;
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const double d = cur[i + 1] - cur[i];
      const double scale = std::max({std::abs(cur[i]), std::abs(cur[i + 1]), 1e-300});
      if (col % 2 == 1 && std::abs(d) <= 1e-14 * scale) {
        settled = true;
        break;
      }
      next[i] = prev[i + 1] + 1.0 / d;
    }
    // Differences at rounding level: the current even column has converged.
    if (settled) break;
    prev = std::move(cur);
    cur = std::move(next);
    if (col % 2 == 0) estimates.push_back(cur.back());
  }

  const double value = estimates.back();
  const double change =
      estimates.size() > 1 ? std::abs(value - estimates[estimates.size() - 2]) : 0.0;
  if (!std::isfinite(value) || change > kTailLimitTolerance * std::abs(value)) {
    throw ExtrapolationError(fmt::format(
        "tail ratio limit did not settle (estimate {:.6g}, last change {:.3g}; ratios "
        "{:.6g} at t=1e-{} and {:.6g} at t=1e-{})",
        value, change, seq.front(), kFirst, seq.back(), kFirst + kPoints - 1));
  }
  return value;
}

double numerical_lower_tail_copula(const CopulaModel& model, double x, double y) {
  check_nonnegative(x, "x");
  check_nonnegative(y, "y");
  if (x == 0.0 || y == 0.0) return 0.0;
  // Evaluation points must stay inside the unit square.
  const double mx = std::max(x, y);
  const double limit = extrapolate_tail_limit([&](double t) {
    const double s = t / std::max(1.0, mx);
    return copula_cdf(model, s * x, s * y) / s;
  });
  return std::max(0.0, limit);
}

double lower_tail_copula(const CopulaModel& model, double x, double y) {
  check_nonnegative(x, "x");
  check_nonnegative(y, "y");
  if (x == 0.0 || y == 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [&](const Independence&) { return 0.0; },
          [&](const Comonotone&) { return std::min(x, y); },
          [&](const Clayton& c) {
            return std::pow(std::pow(x, -c.theta) + std::pow(y, -c.theta), -1.0 / c.theta);
          },
          // Tail independent for every |rho| < 1. C(t, t)/t decays only like a
          // power of t times a slowly varying factor, too slowly to extrapolate.
          [&](const GaussianCopula&) { return 0.0; },
          [&](const StudentT&) { return numerical_lower_tail_copula(model, x, y); },
      },
      model.kind());
}

double upper_tail_copula(const CopulaModel& model, double x, double y) {
  check_nonnegative(x, "x");
  check_nonnegative(y, "y");
  return std::visit(
      Overloaded{
          [&](const Independence&) { return 0.0; },
          [&](const Comonotone&) { return std::min(x, y); },
          [&](const Clayton&) { return 0.0; },
          // Radially symmetric families share lower and upper tails.
          [&](const GaussianCopula&) { return lower_tail_copula(model, x, y); },
          [&](const StudentT&) { return lower_tail_copula(model, x, y); },
      },
      model.kind());
}

double tail_asymptotic_variance(double lambda, double d_dx, double d_dy) {
  return lambda + d_dx * d_dx + d_dy * d_dy +
         2.0 * lambda * ((d_dx - 1.0) * (d_dy - 1.0) - 1.0);
}

TailOracle tail_oracle(const CopulaModel& model, TailSide side) {
  TailOracle o;
  std::visit(
      Overloaded{
          [&](const Independence&) {},
          [&](const Comonotone&) {
            o.lambda = 1.0;
            o.d_dx = o.d_dy = 0.5;
          },
          [&](const Clayton& c) {
            if (side == TailSide::Upper) return;
            o.lambda = std::pow(2.0, -1.0 / c.theta);
            o.d_dx = o.d_dy = std::pow(2.0, -1.0 / c.theta - 1.0);
          },
          [&](const auto&) {
            o.lambda = side == TailSide::Lower ? lower_tail_copula(model, 1.0, 1.0)
                                               : upper_tail_copula(model, 1.0, 1.0);
            o.d_dx = o.d_dy = o.lambda / 2.0;
          },
      },
      model.kind());
  o.sigma2 = tail_asymptotic_variance(o.lambda, o.d_dx, o.d_dy);
  return o;
}

}  // namespace cbtail

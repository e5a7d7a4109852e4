#pragma once

#include <cstddef>
#include <optional>

#include "cbtail/checkerboard.hpp"
#include "cbtail/copula_models.hpp"
#include "cbtail/empirical_copula.hpp"

namespace cbtail {

enum class Smoothing { Raw, Checkerboard };

// What to do when k x / n (or k y / n) exceeds 1.
enum class ArgumentPolicy { Clamp, Reject };

// Lazy evaluates the four corners a query touches; Dense materialises the
// whole (m+1)^2 count grid up front. Both give identical values.
enum class GridMode { Lazy, Dense };

struct TailEstimate {
  double value = 0.0;
  bool clamped = false;  // a copula argument was clamped to [0, 1]
};

// Copula arguments of a tail evaluation. For the lower tail (u, v) =
// (kx/n, ky/n) and linear = 0; for the upper tail (u, v) = (1 - kx/n,
// 1 - ky/n) and linear = kx + ky - n. The estimate is then
// (linear + n * C(u, v)) / k for the copula C being smoothed.
struct TailQuery {
  double u = 0.0;
  double v = 0.0;
  double linear = 0.0;
  bool clamped = false;
};

TailQuery tail_query(std::size_t n, std::size_t k, TailSide side, double x, double y,
                     ArgumentPolicy policy);

// T_m applied to a function known through its corner values corner(a, b)
// at (a/m, b/m).
template <class Corner>
double smooth_at(const Corner& corner, int m, double u, double v) {
  const CellLocation c = locate_cell(u, v, m);
  const CornerWeights w = corner_weights(c);
  double s = 0.0;
  // Corners with zero weight are skipped: at grid-aligned queries this
  // avoids evaluating neighbours that cannot contribute.
  if (w.w00 != 0.0) s += w.w00 * corner(c.i - 1, c.j - 1);
  if (w.w10 != 0.0) s += w.w10 * corner(c.i, c.j - 1);
  if (w.w01 != 0.0) s += w.w01 * corner(c.i - 1, c.j);
  if (w.w11 != 0.0) s += w.w11 * corner(c.i, c.j);
  return s;
}

// Tail copula estimator on a fixed sample:
//   lower  Λ̂_L(x, y) = (n/k) Ĉ(kx/n, ky/n)
//   upper  Λ̂_U(x, y) = (n/k) [kx/n + ky/n - 1 + Ĉ(1 - kx/n, 1 - ky/n)]
// with Ĉ the empirical copula (Raw) or its checkerboard T_m Ĉ_n
// (Checkerboard). Values are formed from integer counts, so comonotone
// samples give exactly 1 at grid-aligned arguments.
class TailEstimator {
 public:
  TailEstimator(EmpiricalCopula copula, std::size_t k, int m, TailSide side,
                Smoothing smoothing = Smoothing::Checkerboard,
                ArgumentPolicy policy = ArgumentPolicy::Clamp,
                GridMode grid = GridMode::Lazy);

  // Throws RangeError when an argument leaves the unit square under
  // ArgumentPolicy::Reject, DomainError for negative or non-finite x, y.
  TailEstimate estimate(double x, double y) const;

  // Same evaluation with the other smoothing, sharing sample, k and m.
  TailEstimate estimate_with(Smoothing smoothing, double x, double y) const;

  // Λ̂(1, 1).
  double lambda_hat() const { return estimate(1.0, 1.0).value; }

  // #{U_i <= u, V_i <= v} after smoothing, i.e. n times the smoothed copula.
  double smoothed_count(double u, double v) const { return smoothed_count(smoothing_, u, v); }
  double smoothed_count(Smoothing smoothing, double u, double v) const;

  const EmpiricalCopula& copula() const { return copula_; }
  std::size_t n() const { return copula_.size(); }
  std::size_t k() const { return k_; }
  int m() const { return m_; }
  TailSide side() const { return side_; }
  Smoothing smoothing() const { return smoothing_; }
  ArgumentPolicy policy() const { return policy_; }

 private:
  double corner_count(int a, int b) const;

  EmpiricalCopula copula_;
  std::size_t k_;
  int m_;
  TailSide side_;
  Smoothing smoothing_;
  ArgumentPolicy policy_;
  std::optional<CheckerboardGrid> dense_;
};

// Side-checked entry points; throw DomainError if the estimator was built
// for the other tail.
TailEstimate lower_tail_estimate(const TailEstimator& est, double x, double y);
TailEstimate upper_tail_estimate(const TailEstimator& est, double x, double y);

inline double lambda_hat(const TailEstimator& est) { return est.lambda_hat(); }

// Deviation bound between checkerboard and raw tail estimates, 4n/(k m).
double checkerboard_tail_gap_bound(std::size_t n, std::size_t k, int m);

}  // namespace cbtail

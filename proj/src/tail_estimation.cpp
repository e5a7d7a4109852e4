#include "cbtail/tail_estimation.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cbtail/errors.hpp"

namespace cbtail {

namespace {

double scaled_argument(std::size_t n, std::size_t k, double x, const char* name,
                       ArgumentPolicy policy, bool& clamped) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError(fmt::format("tail argument {} must be finite and >= 0, got {}", name, x));
  }
  const double s = static_cast<double>(k) * x;
  const double dn = static_cast<double>(n);
  if (s <= dn) return s;
  if (policy == ArgumentPolicy::Reject) {
    throw RangeError(fmt::format(
        "k*{}/n = {} exceeds 1 (k={}, n={}, {}={}); tail arguments beyond the unit "
        "square need clamping",
        name, s / dn, k, n, name, x));
  }
  clamped = true;
  return dn;
}

}  // namespace

TailQuery tail_query(std::size_t n, std::size_t k, TailSide side, double x, double y,
                     ArgumentPolicy policy) {
  TailQuery q;
  const double sx = scaled_argument(n, k, x, "x", policy, q.clamped);
  const double sy = scaled_argument(n, k, y, "y", policy, q.clamped);
  const double dn = static_cast<double>(n);
  if (side == TailSide::Lower) {
    q.u = sx / dn;
    q.v = sy / dn;
  } else {
    // (n - kx)/n rather than 1 - kx/n keeps integer kx on the rank lattice.
    q.u = (dn - sx) / dn;
    q.v = (dn - sy) / dn;
    q.linear = sx + sy - dn;
  }
  return q;
}

TailEstimator::TailEstimator(EmpiricalCopula copula, std::size_t k, int m, TailSide side,
                             Smoothing smoothing, ArgumentPolicy policy, GridMode grid)
    : copula_(std::move(copula)),
      k_(k),
      m_(m),
      side_(side),
      smoothing_(smoothing),
      policy_(policy) {
  if (k_ < 1 || k_ > copula_.size()) {
    throw DomainError(fmt::format("k must lie in [1, n] = [1, {}], got {}", copula_.size(), k_));
  }
  check_resolution(m_);
  if (smoothing_ == Smoothing::Checkerboard && grid == GridMode::Dense) {
    dense_ = build_count_grid(copula_, m_);
  }
}

double TailEstimator::corner_count(int a, int b) const {
  if (dense_) return dense_->at(a, b);
  return static_cast<double>(
      copula_.count(grid_coordinate(a, m_), grid_coordinate(b, m_)));
}

double TailEstimator::smoothed_count(Smoothing smoothing, double u, double v) const {
  if (smoothing == Smoothing::Raw) return static_cast<double>(copula_.count(u, v));
  return smooth_at([this](int a, int b) { return corner_count(a, b); }, m_, u, v);
}

TailEstimate TailEstimator::estimate(double x, double y) const {
  return estimate_with(smoothing_, x, y);
}

TailEstimate TailEstimator::estimate_with(Smoothing smoothing, double x, double y) const {
  const TailQuery q = tail_query(n(), k_, side_, x, y, policy_);
  if (side_ == TailSide::Lower && (q.u == 0.0 || q.v == 0.0)) return {0.0, q.clamped};
  const double value =
      (q.linear + smoothed_count(smoothing, q.u, q.v)) / static_cast<double>(k_);
  return {value, q.clamped};
}

TailEstimate lower_tail_estimate(const TailEstimator& est, double x, double y) {
  if (est.side() != TailSide::Lower) {
    throw DomainError("lower_tail_estimate called on an upper-tail estimator");
  }
  return est.estimate(x, y);
}

TailEstimate upper_tail_estimate(const TailEstimator& est, double x, double y) {
  if (est.side() != TailSide::Upper) {
    throw DomainError("upper_tail_estimate called on a lower-tail estimator");
  }
  return est.estimate(x, y);
}

double checkerboard_tail_gap_bound(std::size_t n, std::size_t k, int m) {
  return 4.0 * static_cast<double>(n) / (static_cast<double>(k) * m);
}

}  // namespace cbtail

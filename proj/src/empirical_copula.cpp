#include "cbtail/empirical_copula.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "cbtail/errors.hpp"

namespace cbtail {

namespace {

void check_permutation(std::span<const std::uint32_t> r, const char* axis) {
  const std::size_t n = r.size();
  std::vector<bool> seen(n + 1, false);
  for (auto v : r) {
    if (v < 1 || v > n || seen[v]) {
      throw DomainError(
          fmt::format("{} ranks are not a permutation of 1..{}", axis, n));
    }
    seen[v] = true;
  }
}

std::vector<std::uint32_t> rank_vector(std::span<const double> values,
                                       const char* axis) {
  const std::size_t n = values.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return values[a] < values[b];
  });
  std::vector<std::uint32_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (r > 0 && !(values[order[r - 1]] < values[order[r]])) {
      throw TieError(fmt::format(
          "tied {} values ({}) at sample positions {} and {}; ranks require "
          "continuous marginals",
          axis, values[order[r]], order[r - 1], order[r]));
    }
    rank[order[r]] = static_cast<std::uint32_t>(r + 1);
  }
  return rank;
}

}  // namespace

PseudoSample::PseudoSample(std::vector<std::uint32_t> rank_x,
                           std::vector<std::uint32_t> rank_y)
    : rank_x_(std::move(rank_x)), rank_y_(std::move(rank_y)) {
  if (rank_x_.size() != rank_y_.size()) {
    throw DomainError("pseudo sample coordinates differ in length");
  }
  if (rank_x_.empty()) throw DomainError("pseudo sample is empty");
  check_permutation(rank_x_, "x");
  check_permutation(rank_y_, "y");
  const double n = static_cast<double>(rank_x_.size());
  us_.resize(rank_x_.size());
  vs_.resize(rank_y_.size());
  for (std::size_t i = 0; i < rank_x_.size(); ++i) {
    us_[i] = static_cast<double>(rank_x_[i]) / n;
    vs_[i] = static_cast<double>(rank_y_[i]) / n;
  }
}

PseudoSample ranks(const BivariateSample& sample) {
  if (sample.xs.size() != sample.ys.size()) {
    throw DomainError(fmt::format("sample columns differ in length ({} vs {})",
                                  sample.xs.size(), sample.ys.size()));
  }
  if (sample.xs.empty()) throw DomainError("sample is empty");
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (!std::isfinite(sample.xs[i]) || !std::isfinite(sample.ys[i])) {
      throw DomainError(fmt::format("non-finite observation at position {}", i));
    }
  }
  return PseudoSample(rank_vector(sample.xs, "x"), rank_vector(sample.ys, "y"));
}

std::size_t rank_threshold(std::size_t n, double u) {
  if (!(u >= 0.0)) return 0;  // also catches NaN
  if (u >= 1.0) return n;
  const double dn = static_cast<double>(n);
  auto r = static_cast<std::size_t>(std::floor(u * dn));
  if (r > n) r = n;
  while (r < n && static_cast<double>(r + 1) / dn <= u) ++r;
  while (r > 0 && static_cast<double>(r) / dn > u) --r;
  return r;
}

EmpiricalCopula::EmpiricalCopula(PseudoSample pseudo)
    : pseudo_(std::move(pseudo)),
      n_(pseudo_.size()),
      y_of_x_(n_ + 1, 0),
      idx_of_x_(n_ + 1, 0),
      idx_of_y_(n_ + 1, 0) {
  for (std::size_t i = 0; i < n_; ++i) {
    const auto rx = pseudo_.rank_x(i);
    y_of_x_[rx] = pseudo_.rank_y(i);
    idx_of_x_[rx] = static_cast<std::uint32_t>(i);
    idx_of_y_[pseudo_.rank_y(i)] = static_cast<std::uint32_t>(i);
  }
}

std::size_t EmpiricalCopula::count(double u, double v) const {
  return count_ranks(rank_threshold(n_, u), rank_threshold(n_, v));
}

std::size_t EmpiricalCopula::count_ranks(std::size_t rx, std::size_t ry) const {
  if (rx == 0 || ry == 0) return 0;
  std::size_t c = 0;
  if (2 * rx <= n_) {
    for (std::size_t r = 1; r <= rx; ++r) c += (y_of_x_[r] <= ry);
    return c;
  }
  // Complement: ry points have y-rank <= ry; drop those with x-rank > rx.
  for (std::size_t r = rx + 1; r <= n_; ++r) c += (y_of_x_[r] <= ry);
  return ry - c;
}

double empirical_copula_eval(const PseudoSample& pseudo, double u, double v) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < pseudo.size(); ++i) {
    c += (pseudo.u(i) <= u && pseudo.v(i) <= v);
  }
  return static_cast<double>(c) / static_cast<double>(pseudo.size());
}

EmpiricalCountTable::EmpiricalCountTable(const EmpiricalCopula& copula)
    : n_(copula.size()) {
  if (n_ > kMaxSize) {
    throw DomainError(fmt::format(
        "count table limited to n <= {} (got {})", kMaxSize, n_));
  }
  const std::size_t w = n_ + 1;
  table_.assign(w * w, 0);
  auto y_of_x = copula.y_rank_by_x_rank();
  for (std::size_t rx = 1; rx <= n_; ++rx) {
    const std::size_t ry_point = y_of_x[rx];
    const std::uint32_t* prev = &table_[(rx - 1) * w];
    std::uint32_t* row = &table_[rx * w];
    for (std::size_t ry = 0; ry <= n_; ++ry) {
      row[ry] = prev[ry] + (ry >= ry_point ? 1u : 0u);
    }
  }
}

WeightedStepFunction::WeightedStepFunction(std::span<const double> locations,
                                           std::span<const double> weights) {
  if (locations.size() != weights.size()) {
    throw DomainError("locations and weights differ in length");
  }
  if (locations.empty()) throw DomainError("step function needs atoms");
  std::vector<std::size_t> order(locations.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return locations[a] < locations[b];
  });
  locations_.reserve(order.size());
  cumulative_.reserve(order.size());
  double acc = 0.0;
  for (auto i : order) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw NonPositiveWeightError(
          fmt::format("weight {} at position {} is not positive", weights[i], i));
    }
    acc += weights[i];
    locations_.push_back(locations[i]);
    cumulative_.push_back(acc);
  }
  total_ = acc;
}

double WeightedStepFunction::operator()(double x) const {
  auto it = std::upper_bound(locations_.begin(), locations_.end(), x);
  if (it == locations_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - locations_.begin()) - 1] /
         total_;
}

std::size_t WeightedStepFunction::inverse_index(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(fmt::format("generalized inverse needs p in [0,1], got {}", p));
  }
  if (p == 0.0) return 0;
  // K at the j-th atom is cumulative_[j] / total_, nondecreasing in j.
  auto it = std::partition_point(
      cumulative_.begin(), cumulative_.end(),
      [&](double c) { return c / total_ < p; });
  return static_cast<std::size_t>(it - cumulative_.begin());
}

double WeightedStepFunction::generalized_inverse(double p) const {
  return locations_[inverse_index(p)];
}

std::vector<double> WeightedStepFunction::masses() const {
  std::vector<double> m(cumulative_.size());
  double prev = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    m[j] = (cumulative_[j] - prev) / total_;
    prev = cumulative_[j];
  }
  return m;
}

double weighted_empirical_copula_eval(const BivariateSample& sample,
                                      std::span<const double> weights,
                                      double u, double v) {
  if (weights.size() != sample.size()) {
    throw DomainError("weights and sample differ in length");
  }
  const WeightedStepFunction f(sample.xs, weights);
  const WeightedStepFunction g(sample.ys, weights);
  const double x_star = f.generalized_inverse(u);
  const double y_star = g.generalized_inverse(v);
  // H is accumulated in x-sorted order over the same weights that F uses,
  // so H(∞, ∞) = 1 exactly.
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return sample.xs[a] < sample.xs[b];
  });
  double mass = 0.0;
  for (auto i : order) {
    if (sample.xs[i] <= x_star && sample.ys[i] <= y_star) mass += weights[i];
  }
  return mass / f.total_weight();
}

double max_normalized_weight(std::span<const double> weights) {
  if (weights.empty()) return 0.0;
  double total = 0.0;
  double mx = 0.0;
  for (double w : weights) {
    total += w;
    mx = std::max(mx, w);
  }
  return mx / total;
}

WeightedRankCopula::WeightedRankCopula(const EmpiricalCopula& base)
    : base_(&base),
      w_by_x_(base.size() + 1, 0.0),
      cum_x_(base.size() + 1, 0.0),
      cum_y_(base.size() + 1, 0.0) {}

void WeightedRankCopula::assign(std::span<const double> weights) {
  const std::size_t n = base_->size();
  if (weights.size() != n) {
    throw DomainError(fmt::format("expected {} weights, got {}", n, weights.size()));
  }
  auto idx_x = base_->index_by_x_rank();
  auto idx_y = base_->index_by_y_rank();
  double mx = 0.0;
  for (std::size_t r = 1; r <= n; ++r) {
    const double w = weights[idx_x[r]];
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw NonPositiveWeightError(fmt::format(
          "weight {} at position {} is not positive", w, idx_x[r]));
    }
    w_by_x_[r] = w;
    cum_x_[r] = cum_x_[r - 1] + w;
    cum_y_[r] = cum_y_[r - 1] + weights[idx_y[r]];
    mx = std::max(mx, w);
  }
  max_weight_ = mx;
}

namespace {

std::size_t inverse_rank(const std::vector<double>& cum, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(fmt::format("generalized inverse needs p in [0,1], got {}", p));
  }
  const std::size_t n = cum.size() - 1;
  if (p == 0.0) return 1;
  const double total = cum[n];
  auto it = std::partition_point(cum.begin() + 1, cum.end(),
                                 [&](double c) { return c / total < p; });
  return static_cast<std::size_t>(it - cum.begin());
}

}  // namespace

std::size_t WeightedRankCopula::inverse_rank_x(double p) const {
  return inverse_rank(cum_x_, p);
}

std::size_t WeightedRankCopula::inverse_rank_y(double p) const {
  return inverse_rank(cum_y_, p);
}

double WeightedRankCopula::joint_mass(std::size_t rx, std::size_t ry) const {
  auto y_of_x = base_->y_rank_by_x_rank();
  double mass = 0.0;
  for (std::size_t r = 1; r <= rx; ++r) {
    if (y_of_x[r] <= ry) mass += w_by_x_[r];
  }
  return mass / cum_x_.back();
}

double WeightedRankCopula::operator()(double u, double v) const {
  return joint_mass(inverse_rank_x(u), inverse_rank_y(v));
}

double WeightedRankCopula::delta_n() const {
  return max_weight_ / cum_x_.back();
}

}  // namespace cbtail

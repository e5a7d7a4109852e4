#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cbtail {

// n paired observations with continuous (unknown) marginals.
struct BivariateSample {
  std::vector<double> xs;
  std::vector<double> ys;

  std::size_t size() const { return xs.size(); }
};

// Rank-transformed sample: U_i = R_{X_i}/n, V_i = R_{Y_i}/n.
class PseudoSample {
 public:
  // Ranks are 1-based and must each be a permutation of {1, ..., n}.
  PseudoSample(std::vector<std::uint32_t> rank_x,
               std::vector<std::uint32_t> rank_y);

  std::size_t size() const { return rank_x_.size(); }
  std::uint32_t rank_x(std::size_t i) const { return rank_x_[i]; }
  std::uint32_t rank_y(std::size_t i) const { return rank_y_[i]; }
  double u(std::size_t i) const { return us_[i]; }
  double v(std::size_t i) const { return vs_[i]; }
  std::span<const double> us() const { return us_; }
  std::span<const double> vs() const { return vs_; }
  std::span<const std::uint32_t> ranks_x() const { return rank_x_; }
  std::span<const std::uint32_t> ranks_y() const { return rank_y_; }

 private:
  std::vector<std::uint32_t> rank_x_;
  std::vector<std::uint32_t> rank_y_;
  std::vector<double> us_;
  std::vector<double> vs_;
};

// Throws TieError on tied values within a coordinate, DomainError on
// non-finite values or mismatched lengths.
PseudoSample ranks(const BivariateSample& sample);

// Largest r in [0, n] with double(r)/double(n) <= u, i.e. the number of
// pseudo-observations U_i = i/n that satisfy U_i <= u.
std::size_t rank_threshold(std::size_t n, double u);

// The classical empirical copula. Queries scan the points in x-rank order,
// touching min(r, n - r) points for an x-threshold r.
class EmpiricalCopula {
 public:
  explicit EmpiricalCopula(PseudoSample pseudo);

  std::size_t size() const { return n_; }
  const PseudoSample& pseudo() const { return pseudo_; }

  // #{i : U_i <= u, V_i <= v}.
  std::size_t count(double u, double v) const;
  // Count with thresholds already expressed as ranks in [0, n].
  std::size_t count_ranks(std::size_t rx, std::size_t ry) const;

  double operator()(double u, double v) const {
    return static_cast<double>(count(u, v)) / static_cast<double>(n_);
  }

  // y-rank of the point holding x-rank r, indexed 1..n (entry 0 unused).
  std::span<const std::uint32_t> y_rank_by_x_rank() const { return y_of_x_; }
  // Sample index of the point holding x-rank r (entry 0 unused).
  std::span<const std::uint32_t> index_by_x_rank() const { return idx_of_x_; }
  std::span<const std::uint32_t> index_by_y_rank() const { return idx_of_y_; }

 private:
  PseudoSample pseudo_;
  std::size_t n_;
  std::vector<std::uint32_t> y_of_x_;
  std::vector<std::uint32_t> idx_of_x_;
  std::vector<std::uint32_t> idx_of_y_;
};

// Ĉ_n(u, v) evaluated directly from its indicator-average definition.
double empirical_copula_eval(const PseudoSample& pseudo, double u, double v);

// (n+1) x (n+1) cumulative count table over the rank lattice; count() is
// O(1) afterwards and agrees exactly with EmpiricalCopula::count.
class EmpiricalCountTable {
 public:
  static constexpr std::size_t kMaxSize = 4096;

  explicit EmpiricalCountTable(const EmpiricalCopula& copula);

  std::size_t size() const { return n_; }
  std::size_t count(double u, double v) const {
    return count_ranks(rank_threshold(n_, u), rank_threshold(n_, v));
  }
  std::size_t count_ranks(std::size_t rx, std::size_t ry) const {
    return table_[rx * (n_ + 1) + ry];
  }
  double operator()(double u, double v) const {
    return static_cast<double>(count(u, v)) / static_cast<double>(n_);
  }

 private:
  std::size_t n_;
  std::vector<std::uint32_t> table_;
};

// Distribution function of finitely many weighted atoms,
// K(x) = sum_{x_i <= x} w_i / sum_i w_i.
class WeightedStepFunction {
 public:
  // Locations may be unsorted; weights must be positive.
  WeightedStepFunction(std::span<const double> locations,
                       std::span<const double> weights);

  double operator()(double x) const;

  // K^-(p) = inf{x : K(x) >= p} for 0 < p <= 1 and sup{x : K(x) = 0} for
  // p = 0. The latter is the smallest atom.
  double generalized_inverse(double p) const;

  // Index (into sorted locations) of K^-(p).
  std::size_t inverse_index(double p) const;

  std::span<const double> locations() const { return locations_; }
  std::vector<double> masses() const;
  double total_weight() const { return total_; }

 private:
  std::vector<double> locations_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

inline double generalized_inverse(const WeightedStepFunction& k, double p) {
  return k.generalized_inverse(p);
}

// Ĉ_n^{ξ,ξ}(u, v) = H_n^ξ((F_n^ξ)^-(u), (G_n^ξ)^-(v)) built from the raw
// sample values. Reference path: O(n log n) per call.
double weighted_empirical_copula_eval(const BivariateSample& sample,
                                      std::span<const double> weights,
                                      double u, double v);

// Δ_n = max_i ξ_i / (n ξ̄_n).
double max_normalized_weight(std::span<const double> weights);

// Weighted empirical copula on the rank lattice of an EmpiricalCopula.
// Equivalent to weighted_empirical_copula_eval (the copula depends on the
// data only through the ranks) but reusable across multiplier draws without
// reallocating. Cumulative weights are accumulated in rank order, the same
// order the reference path uses after sorting.
class WeightedRankCopula {
 public:
  explicit WeightedRankCopula(const EmpiricalCopula& base);

  // Installs a new set of weights indexed by sample position.
  void assign(std::span<const double> weights);

  double operator()(double u, double v) const;

  // Rank (1..n) of (F_n^ξ)^-(u) and (G_n^ξ)^-(v).
  std::size_t inverse_rank_x(double p) const;
  std::size_t inverse_rank_y(double p) const;
  // H_n^ξ over the points with x-rank <= rx and y-rank <= ry.
  double joint_mass(std::size_t rx, std::size_t ry) const;

  double delta_n() const;

 private:
  const EmpiricalCopula* base_;
  std::vector<double> w_by_x_;
  std::vector<double> cum_x_;
  std::vector<double> cum_y_;
  double max_weight_ = 0.0;
};

}  // namespace cbtail

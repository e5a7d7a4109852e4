#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cbtail/empirical_copula.hpp"
#include "cbtail/rng.hpp"
#include "cbtail/tail_estimation.hpp"

namespace cbtail {

// Law of the positive multipliers ξ_i with population mean mu and standard
// deviation tau. A custom law must be supported on (0, inf) and have a
// sub-exponential tail; only positivity can be checked at draw time.
struct MultiplierLaw {
  enum class Kind { StdExponential, Custom };

  Kind kind = Kind::StdExponential;
  std::string name = "std_exponential";
  double mu = 1.0;
  double tau = 1.0;
  std::function<double(Engine&)> sampler;  // Custom only

  static MultiplierLaw standard_exponential();
  static MultiplierLaw custom(std::string name, double mu, double tau,
                              std::function<double(Engine&)> sampler);
};

struct MultiplierDraw {
  std::vector<double> xi;
  double xi_bar = 0.0;

  std::size_t size() const { return xi.size(); }
  // Δ_n = max_i ξ_i / (n ξ̄_n).
  double delta_n() const;
};

// Throws NonPositiveWeightError if the law produces a value <= 0 or
// a non-finite value.
MultiplierDraw draw_multipliers(const MultiplierLaw& law, std::size_t n, Engine& rng);
// Refills `draw` in place, reusing its storage.
void draw_multipliers_into(const MultiplierLaw& law, std::size_t n, Engine& rng,
                           MultiplierDraw& draw);

// Bootstrap tail copula Λ̂^{ξ,ξ} for one estimator and changing multipliers.
// Checkerboard smoothing interpolates the weighted empirical copula
// Ĉ_n^{ξ,ξ} between its values at (a/m, b/m); corners on the lower and
// left edges are 0 so that the smoothed copula is grounded. Holds a
// reference to the estimator, which must outlive it.
class BootstrapTailEvaluator {
 public:
  explicit BootstrapTailEvaluator(const TailEstimator& est);

  void assign(std::span<const double> xi) { weighted_.assign(xi); }

  // Λ̂^{ξ,ξ}(x, y) for the installed multipliers.
  double tail(Smoothing smoothing, double x, double y) const;

  const WeightedRankCopula& weighted() const { return weighted_; }

 private:
  double corner(int a, int b) const;

  const TailEstimator* est_;
  WeightedRankCopula weighted_;
};

// Λ̂^{(m),ξ,ξ}(x, y) (or the raw Λ̂^{ξ,ξ} for a Raw estimator).
double bootstrap_tail_replicate(const TailEstimator& est, const MultiplierDraw& draw,
                                double x = 1.0, double y = 1.0);
// Same, building the estimator from a raw sample.
double bootstrap_tail_replicate(const BivariateSample& sample, const MultiplierDraw& draw,
                                std::size_t k, int m, TailSide side, double x, double y);

// Sorted replicate values δ_b = (μ/τ) √k (λ̂^{ξ,ξ}_b - λ̂).
class BootstrapDistribution {
 public:
  BootstrapDistribution() = default;
  explicit BootstrapDistribution(std::vector<double> replicates);

  std::size_t size() const { return sorted_.size(); }
  bool empty() const { return sorted_.empty(); }
  // Replicates in generation order b = 0, 1, ...
  const std::vector<double>& replicates() const { return replicates_; }
  const std::vector<double>& sorted() const { return sorted_; }

  // Lower order statistic x_(⌈pB⌉) for p in (0, 1], x_(1) for p = 0.
  double quantile(double p) const;
  double mean() const;
  // Sample standard deviation (divisor B - 1).
  double sd() const;

 private:
  std::vector<double> replicates_;
  std::vector<double> sorted_;
};

// Replicate b draws its multipliers from make_stream(master, prefix ++ {b}),
// so the distribution does not depend on how the B-loop is scheduled.
struct StreamSeed {
  std::uint64_t master = 0;
  std::vector<std::uint64_t> prefix;
};

// Both smoothings from the same multiplier draws. `checkerboard` holds the
// checkerboard bootstrap, `raw` the classical direct multiplier bootstrap
// of the raw tail empirical copula.
struct BootstrapPair {
  BootstrapDistribution checkerboard;
  BootstrapDistribution raw;
  double lambda_checkerboard = 0.0;
  double lambda_raw = 0.0;
};

BootstrapPair bootstrap_pair_serial(const TailEstimator& est, const MultiplierLaw& law,
                                    std::size_t B, const StreamSeed& seed,
                                    double x = 1.0, double y = 1.0);
BootstrapPair bootstrap_pair_parallel(const TailEstimator& est, const MultiplierLaw& law,
                                      std::size_t B, const StreamSeed& seed, int threads,
                                      double x = 1.0, double y = 1.0);
// Serial reference for threads <= 1; both kernels agree bit for bit.
BootstrapPair bootstrap_pair(const TailEstimator& est, const MultiplierLaw& law,
                             std::size_t B, const StreamSeed& seed, int threads = 1,
                             double x = 1.0, double y = 1.0);

// Distribution for the estimator's own smoothing at (1, 1). Throws
// DomainError for B < 2.
BootstrapDistribution bootstrap_distribution(const TailEstimator& est,
                                             const MultiplierLaw& law, std::size_t B,
                                             const StreamSeed& seed, int threads = 1);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double raw_lo = 0.0;  // before clamping to [0, 1]
  double raw_hi = 0.0;
  bool clamped = false;

  double length() const { return hi - lo; }
  bool contains(double value) const { return lo <= value && value <= hi; }
};

// Quantile inversion with γ = 1 - level:
//   lo = λ̂ - q_{1-γ/2} / √k,   hi = λ̂ - q_{γ/2} / √k.
// Throws EmptyDistributionError on an empty distribution.
ConfidenceInterval confidence_interval(const BootstrapDistribution& dist, double lambda_hat,
                                       std::size_t k, double level, bool clamp = true);

}  // namespace cbtail

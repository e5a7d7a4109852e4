#include "cbtail/multiplier_bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>

#include <fmt/format.h>

#include "cbtail/errors.hpp"

namespace cbtail {

MultiplierLaw MultiplierLaw::standard_exponential() { return MultiplierLaw{}; }

MultiplierLaw MultiplierLaw::custom(std::string name, double mu, double tau,
                                    std::function<double(Engine&)> sampler) {
  if (!(mu > 0.0) || !(tau > 0.0) || !std::isfinite(mu) || !std::isfinite(tau)) {
    throw DomainError(fmt::format("multiplier law needs mu > 0 and tau > 0, got {} and {}",
                                  mu, tau));
  }
  if (!sampler) throw DomainError("custom multiplier law needs a sampler");
  MultiplierLaw law;
  law.kind = Kind::Custom;
  law.name = std::move(name);
  law.mu = mu;
  law.tau = tau;
  law.sampler = std::move(sampler);
  return law;
}

double MultiplierDraw::delta_n() const { return max_normalized_weight(xi); }

void draw_multipliers_into(const MultiplierLaw& law, std::size_t n, Engine& rng,
                           MultiplierDraw& draw) {
  if (n < 1) throw DomainError("need at least one multiplier");
  draw.xi.resize(n);
  if (law.kind == MultiplierLaw::Kind::StdExponential) {
    for (auto& x : draw.xi) x = standard_exponential(rng);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = law.sampler(rng);
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw NonPositiveWeightError(fmt::format(
            "multiplier law '{}' produced {} at position {}", law.name, x, i));
      }
      draw.xi[i] = x;
    }
  }
  draw.xi_bar = std::accumulate(draw.xi.begin(), draw.xi.end(), 0.0) /
                static_cast<double>(n);
}

MultiplierDraw draw_multipliers(const MultiplierLaw& law, std::size_t n, Engine& rng) {
  MultiplierDraw draw;
  draw_multipliers_into(law, n, rng, draw);
  return draw;
}

BootstrapTailEvaluator::BootstrapTailEvaluator(const TailEstimator& est)
    : est_(&est), weighted_(est.copula()) {}

double BootstrapTailEvaluator::corner(int a, int b) const {
  if (a == 0 || b == 0) return 0.0;
  const int m = est_->m();
  return weighted_(grid_coordinate(a, m), grid_coordinate(b, m));
}

double BootstrapTailEvaluator::tail(Smoothing smoothing, double x, double y) const {
  const TailQuery q = tail_query(est_->n(), est_->k(), est_->side(), x, y, est_->policy());
  if (est_->side() == TailSide::Lower && (q.u == 0.0 || q.v == 0.0)) return 0.0;
  const double c = smoothing == Smoothing::Raw
                       ? weighted_(q.u, q.v)
                       : smooth_at([this](int a, int b) { return corner(a, b); },
                                   est_->m(), q.u, q.v);
  return (q.linear + static_cast<double>(est_->n()) * c) / static_cast<double>(est_->k());
}

double bootstrap_tail_replicate(const TailEstimator& est, const MultiplierDraw& draw,
                                double x, double y) {
  BootstrapTailEvaluator ev(est);
  ev.assign(draw.xi);
  return ev.tail(est.smoothing(), x, y);
}

double bootstrap_tail_replicate(const BivariateSample& sample, const MultiplierDraw& draw,
                                std::size_t k, int m, TailSide side, double x, double y) {
  const TailEstimator est(EmpiricalCopula(ranks(sample)), k, m, side);
  return bootstrap_tail_replicate(est, draw, x, y);
}

BootstrapDistribution::BootstrapDistribution(std::vector<double> replicates)
    : replicates_(std::move(replicates)), sorted_(replicates_) {
  std::sort(sorted_.begin(), sorted_.end());
}

double BootstrapDistribution::quantile(double p) const {
  if (sorted_.empty()) throw EmptyDistributionError("quantile of an empty bootstrap distribution");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(fmt::format("quantile level must lie in [0, 1], got {}", p));
  }
  const double B = static_cast<double>(sorted_.size());
  // The guard keeps pB = 45.000000000000004 from moving up an order statistic.
  auto idx = static_cast<std::size_t>(std::ceil(p * B - 1e-9));
  idx = std::clamp<std::size_t>(idx, 1, sorted_.size());
  return sorted_[idx - 1];
}

double BootstrapDistribution::mean() const {
  if (sorted_.empty()) throw EmptyDistributionError("mean of an empty bootstrap distribution");
  return std::accumulate(replicates_.begin(), replicates_.end(), 0.0) /
         static_cast<double>(replicates_.size());
}

double BootstrapDistribution::sd() const {
  if (replicates_.size() < 2) {
    throw EmptyDistributionError("standard deviation needs at least two replicates");
  }
  const double mu = mean();
  double ss = 0.0;
  for (double r : replicates_) ss += (r - mu) * (r - mu);
  return std::sqrt(ss / static_cast<double>(replicates_.size() - 1));
}

namespace {

void check_replicate_count(std::size_t B) {
  if (B < 2) throw DomainError(fmt::format("bootstrap needs B >= 2, got {}", B));
}

struct PairKernel {
  const TailEstimator& est;
  const MultiplierLaw& law;
  const StreamSeed& seed;
  double x;
  double y;
  double lambda_cb;
  double lambda_raw;
  double scale;

  PairKernel(const TailEstimator& e, const MultiplierLaw& l, const StreamSeed& s,
             double xx, double yy)
      : est(e),
        law(l),
        seed(s),
        x(xx),
        y(yy),
        lambda_cb(e.estimate_with(Smoothing::Checkerboard, xx, yy).value),
        lambda_raw(e.estimate_with(Smoothing::Raw, xx, yy).value),
        scale(l.mu / l.tau * std::sqrt(static_cast<double>(e.k()))) {}

  // Per-worker scratch: evaluator, draw buffer and stream path.
  struct Worker {
    BootstrapTailEvaluator ev;
    MultiplierDraw draw;
    std::vector<std::uint64_t> path;
  };

  Worker worker() const {
    Worker w{BootstrapTailEvaluator(est), {}, seed.prefix};
    w.path.push_back(0);
    return w;
  }

  void run(Worker& w, std::size_t b, double& cb, double& raw) const {
    w.path.back() = b;
    Engine rng = make_stream(seed.master, w.path);
    draw_multipliers_into(law, est.n(), rng, w.draw);
    w.ev.assign(w.draw.xi);
    cb = scale * (w.ev.tail(Smoothing::Checkerboard, x, y) - lambda_cb);
    raw = scale * (w.ev.tail(Smoothing::Raw, x, y) - lambda_raw);
  }

  BootstrapPair finish(std::vector<double> cb, std::vector<double> raw) const {
    BootstrapPair out;
    out.checkerboard = BootstrapDistribution(std::move(cb));
    out.raw = BootstrapDistribution(std::move(raw));
    out.lambda_checkerboard = lambda_cb;
    out.lambda_raw = lambda_raw;
    return out;
  }
};

}  // namespace

BootstrapPair bootstrap_pair_serial(const TailEstimator& est, const MultiplierLaw& law,
                                    std::size_t B, const StreamSeed& seed, double x,
                                    double y) {
  check_replicate_count(B);
  const PairKernel kernel(est, law, seed, x, y);
  std::vector<double> cb(B), raw(B);
  auto w = kernel.worker();
  for (std::size_t b = 0; b < B; ++b) kernel.run(w, b, cb[b], raw[b]);
  return kernel.finish(std::move(cb), std::move(raw));
}

BootstrapPair bootstrap_pair_parallel(const TailEstimator& est, const MultiplierLaw& law,
                                      std::size_t B, const StreamSeed& seed, int threads,
                                      double x, double y) {
  check_replicate_count(B);
  const PairKernel kernel(est, law, seed, x, y);
  std::vector<double> cb(B), raw(B);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::int64_t>(B);
#pragma omp parallel num_threads(std::max(threads, 1))
  {
    auto w = kernel.worker();
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < count; ++b) {
      try {
        kernel.run(w, static_cast<std::size_t>(b), cb[b], raw[b]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return kernel.finish(std::move(cb), std::move(raw));
}

BootstrapPair bootstrap_pair(const TailEstimator& est, const MultiplierLaw& law,
                             std::size_t B, const StreamSeed& seed, int threads, double x,
                             double y) {
  if (threads <= 1) return bootstrap_pair_serial(est, law, B, seed, x, y);
  return bootstrap_pair_parallel(est, law, B, seed, threads, x, y);
}

BootstrapDistribution bootstrap_distribution(const TailEstimator& est,
                                             const MultiplierLaw& law, std::size_t B,
                                             const StreamSeed& seed, int threads) {
  BootstrapPair pair = bootstrap_pair(est, law, B, seed, threads);
  return est.smoothing() == Smoothing::Raw ? std::move(pair.raw)
                                           : std::move(pair.checkerboard);
}

ConfidenceInterval confidence_interval(const BootstrapDistribution& dist, double lambda_hat,
                                       std::size_t k, double level, bool clamp) {
  if (dist.empty()) throw EmptyDistributionError("confidence interval from an empty distribution");
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError(fmt::format("confidence level must lie in (0, 1), got {}", level));
  }
  if (k < 1) throw DomainError("k must be >= 1");
  const double gamma = 1.0 - level;
  const double root_k = std::sqrt(static_cast<double>(k));
  ConfidenceInterval ci;
  ci.raw_lo = lambda_hat - dist.quantile(1.0 - gamma / 2.0) / root_k;
  ci.raw_hi = lambda_hat - dist.quantile(gamma / 2.0) / root_k;
  ci.lo = ci.raw_lo;
  ci.hi = ci.raw_hi;
  if (clamp) {
    ci.lo = std::clamp(ci.raw_lo, 0.0, 1.0);
    ci.hi = std::clamp(ci.raw_hi, 0.0, 1.0);
    ci.clamped = ci.lo != ci.raw_lo || ci.hi != ci.raw_hi;
  }
  return ci;
}

}  // namespace cbtail

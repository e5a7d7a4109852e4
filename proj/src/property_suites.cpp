#include "cbtail/property_suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "cbtail/checkerboard.hpp"
#include "cbtail/copula_models.hpp"
#include "cbtail/empirical_copula.hpp"
#include "cbtail/multiplier_bootstrap.hpp"
#include "cbtail/rng.hpp"
#include "cbtail/tail_estimation.hpp"

namespace cbtail {

void SuiteResult::record(double lhs, double rhs) {
  ++checks;
  worst = std::max(worst, lhs - rhs);
  if (lhs > rhs) ++violations;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

class Timer {
 public:
  explicit Timer(SuiteResult& r) : r_(r), start_(std::chrono::steady_clock::now()) {}
  ~Timer() {
    r_.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  SuiteResult& r_;
  std::chrono::steady_clock::time_point start_;
};

std::size_t uniform_index(Engine& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform_closed(Engine& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Alternates tail-independent and tail-dependent data.
BivariateSample test_sample(std::size_t s, std::size_t n, Engine& rng) {
  return s % 2 == 0 ? sample(CopulaModel::independence(), n, rng)
                    : sample(CopulaModel::clayton(2.0), n, rng);
}

// Many evaluations of one weighted empirical copula: queries on the rank
// lattice are answered offline by sweeping y-ranks and accumulating
// weights in a Fenwick tree over x-ranks.
class WeightedBatch {
 public:
  WeightedBatch(const EmpiricalCopula& base, const WeightedRankCopula& weighted,
                std::span<const double> xi)
      : base_(base), weighted_(weighted), xi_(xi) {
    total_ = 0.0;
    auto idx_x = base.index_by_x_rank();
    for (std::size_t r = 1; r <= base.size(); ++r) total_ += xi[idx_x[r]];
  }

  std::size_t add(double u, double v) {
    queries_.push_back({weighted_.inverse_rank_x(u), weighted_.inverse_rank_y(v)});
    return queries_.size() - 1;
  }

  std::vector<double> evaluate() const {
    const std::size_t n = base_.size();
    std::vector<std::size_t> order(queries_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return queries_[a].ry < queries_[b].ry; });
    std::vector<double> tree(n + 1, 0.0);
    std::vector<double> out(queries_.size());
    auto idx_y = base_.index_by_y_rank();
    auto rank_x = base_.pseudo().ranks_x();
    std::size_t added = 0;
    for (auto q : order) {
      while (added < queries_[q].ry) {
        ++added;
        const std::size_t i = idx_y[added];
        for (std::size_t p = rank_x[i]; p <= n; p += p & (~p + 1)) tree[p] += xi_[i];
      }
      double s = 0.0;
      for (std::size_t p = queries_[q].rx; p > 0; p -= p & (~p + 1)) s += tree[p];
      out[q] = s / total_;
    }
    return out;
  }

 private:
  struct Query {
    std::size_t rx, ry;
  };
  const EmpiricalCopula& base_;
  const WeightedRankCopula& weighted_;
  std::span<const double> xi_;
  double total_;
  std::vector<Query> queries_;
};

SuiteResult lipschitz_impl(const char* name, bool exact_bound, std::size_t samples,
                           std::size_t n_max, std::size_t pairs, std::uint64_t seed) {
  SuiteResult r;
  r.name = name;
  Timer timer(r);
  for (std::size_t s = 0; s < samples; ++s) {
    Engine rng = make_stream(seed, {s});
    const std::size_t n = std::max<std::size_t>(2, n_max * (s + 1) / samples);
    const EmpiricalCopula cop(ranks(test_sample(s, n, rng)));
    const EmpiricalCountTable table(cop);
    const double dn = static_cast<double>(n);
    for (std::size_t p = 0; p < pairs; ++p) {
      const double u1 = uniform_open(rng), v1 = uniform_open(rng);
      const double u2 = uniform_open(rng), v2 = uniform_open(rng);
      const double lhs = std::abs(table(u2, v2) - table(u1, v1));
      const double d = std::abs(u2 - u1) + std::abs(v2 - v1);
      r.record(lhs, exact_bound ? d + 2.0 / dn + 4 * kEps : 2.0 * d);
    }
  }
  return r;
}

}  // namespace

SuiteResult operator_suite(std::size_t functions, std::size_t queries, std::uint64_t seed) {
  SuiteResult r;
  r.name = "operator";
  Timer timer(r);
  for (std::size_t f = 0; f < functions; ++f) {
    Engine rng = make_stream(seed, {f});
    const int m = static_cast<int>(uniform_index(rng, 1, 64));
    const std::size_t w = static_cast<std::size_t>(m) + 1;
    std::vector<double> corners(w * w);
    for (auto& c : corners) c = uniform_closed(rng, -1.0, 1.0);
    const CheckerboardGrid grid(m, corners);
    double sup = 0.0;
    for (double c : corners) sup = std::max(sup, std::abs(c));

    const double a = uniform_closed(rng, -1, 1), b = uniform_closed(rng, -1, 1);
    const double c = uniform_closed(rng, -1, 1), d = uniform_closed(rng, -1, 1);
    auto bilinear = [&](double u, double v) { return a + b * u + c * v + d * u * v; };
    const CheckerboardGrid plane = build_grid(bilinear, m);
    const double plane_scale = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);

    for (std::size_t q = 0; q < queries; ++q) {
      double u = uniform_open(rng), v = uniform_open(rng);
      // Every eighth query sits on a grid line or the upper edge.
      if (q % 8 == 0) u = grid_coordinate(static_cast<int>(uniform_index(rng, 0, m)), m);
      if (q % 8 == 4) v = grid_coordinate(static_cast<int>(uniform_index(rng, 0, m)), m);

      r.record(std::abs(grid(u, v)), sup * (1.0 + 8 * kEps));

      const CornerWeights cw = corner_weights(locate_cell(u, v, m));
      const double lowest = std::min({cw.w00, cw.w10, cw.w01, cw.w11});
      r.record(-lowest, 0.0);
      r.record(std::abs(cw.w00 + cw.w10 + cw.w01 + cw.w11 - 1.0), 4 * kEps);

      r.record(std::abs(plane(u, v) - bilinear(u, v)), 8 * kEps * plane_scale);

      const int i = static_cast<int>(uniform_index(rng, 0, m));
      const int j = static_cast<int>(uniform_index(rng, 0, m));
      const double at = grid(grid_coordinate(i, m), grid_coordinate(j, m));
      r.record(at == grid.at(i, j) ? 0.0 : 1.0, 0.0);
    }
  }
  return r;
}

SuiteResult lipschitz_suite(std::size_t samples, std::size_t n_max, std::size_t pairs,
                            std::uint64_t seed) {
  return lipschitz_impl("lipschitz-2", false, samples, n_max, pairs, seed);
}

SuiteResult lipschitz_exact_suite(std::size_t samples, std::size_t n_max, std::size_t pairs,
                                  std::uint64_t seed) {
  return lipschitz_impl("lipschitz-exact", true, samples, n_max, pairs, seed);
}

SuiteResult deviation_suite(std::size_t samples, const std::vector<int>& ms, int probe,
                            std::uint64_t seed) {
  SuiteResult r;
  r.name = "deviation";
  Timer timer(r);
  for (std::size_t s = 0; s < samples; ++s) {
    Engine rng = make_stream(seed, {s});
    const std::size_t n = uniform_index(rng, 200, 2000);
    const EmpiricalCopula cop(ranks(test_sample(s, n, rng)));
    const EmpiricalCountTable table(cop);
    for (int m : ms) {
      const CheckerboardGrid grid = build_empirical_grid(cop, m);
      const double bound = 4.0 / m + 4 * kEps;
      double sup = 0.0;
      for (int i = 0; i < probe; ++i) {
        const double u = static_cast<double>(i) / (probe - 1);
        for (int j = 0; j < probe; ++j) {
          const double v = static_cast<double>(j) / (probe - 1);
          sup = std::max(sup, std::abs(grid(u, v) - table(u, v)));
        }
      }
      r.record(sup, bound);
    }
  }
  r.note = fmt::format("{} sup-norm checks over a {}x{} probe grid", r.checks, probe, probe);
  return r;
}

SuiteResult tail_deviation_suite(std::size_t samples, const std::vector<int>& ms, int probe,
                                 std::uint64_t seed) {
  SuiteResult r;
  r.name = "tail-deviation";
  Timer timer(r);
  for (std::size_t s = 0; s < samples; ++s) {
    Engine rng = make_stream(seed, {s});
    const std::size_t n = uniform_index(rng, 200, 2000);
    const auto k_lo = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 0.4)));
    const std::size_t k = uniform_index(rng, k_lo, n / 2);
    const PseudoSample pseudo = ranks(test_sample(s, n, rng));
    for (int m : ms) {
      if (static_cast<std::size_t>(m) > n) continue;
      const double bound = checkerboard_tail_gap_bound(n, k, m) + 1e-12;
      for (TailSide side : {TailSide::Lower, TailSide::Upper}) {
        const TailEstimator est(EmpiricalCopula(pseudo), k, m, side);
        const double top = static_cast<double>(n) / static_cast<double>(k);
        for (int i = 0; i < probe; ++i) {
          for (int j = 0; j < probe; ++j) {
            const double x = top * i / (probe - 1);
            const double y = top * j / (probe - 1);
            const double cb = est.estimate_with(Smoothing::Checkerboard, x, y).value;
            const double raw = est.estimate_with(Smoothing::Raw, x, y).value;
            r.record(std::abs(cb - raw), bound);
          }
        }
      }
    }
  }
  return r;
}

SuiteResult weighted_modulus_suite(ModulusForm form, std::size_t draws, std::size_t n,
                                   std::size_t pairs, std::uint64_t seed) {
  SuiteResult r;
  switch (form) {
    case ModulusForm::AsStated: r.name = "weighted-modulus-as-stated"; break;
    case ModulusForm::UnitV: r.name = "weighted-modulus-v1"; break;
    case ModulusForm::OneSided: r.name = "weighted-modulus-one-sided"; break;
    case ModulusForm::Joint: r.name = "weighted-modulus-joint"; break;
  }
  Timer timer(r);
  Engine data_rng = make_stream(seed, {0});
  const EmpiricalCopula cop(ranks(sample(CopulaModel::clayton(1.0), n, data_rng)));
  WeightedRankCopula weighted(cop);
  const MultiplierLaw law = MultiplierLaw::standard_exponential();
  const double tol = 1e-12;
  double consistency = 0.0;

  for (std::size_t d = 0; d < draws; ++d) {
    Engine rng = make_stream(seed, {1, d});
    const MultiplierDraw draw = draw_multipliers(law, n, rng);
    weighted.assign(draw.xi);
    const double delta = weighted.delta_n();
    WeightedBatch batch(cop, weighted, draw.xi);

    struct Pair {
      double u1, v1, u2, v2;
      std::size_t a, b;
    };
    std::vector<Pair> ps(pairs);
    for (auto& p : ps) {
      p.u1 = uniform_open(rng);
      p.u2 = uniform_open(rng);
      if (p.u2 < p.u1) std::swap(p.u1, p.u2);
      p.v1 = form == ModulusForm::UnitV ? 1.0 : uniform_open(rng);
      p.v2 = form == ModulusForm::Joint ? uniform_open(rng) : p.v1;
      p.a = batch.add(p.u1, p.v1);
      p.b = batch.add(p.u2, p.v2);
    }
    const std::vector<double> c = batch.evaluate();
    // The sweep must agree with the production scan up to rounding.
    for (std::size_t i = 0; i < std::min<std::size_t>(ps.size(), 20); ++i) {
      consistency = std::max(consistency,
                             std::abs(c[ps[i].a] - weighted(ps[i].u1, ps[i].v1)));
    }
    for (const auto& p : ps) {
      const double dc = c[p.b] - c[p.a];
      const double du = p.u2 - p.u1;
      switch (form) {
        case ModulusForm::AsStated:
        case ModulusForm::UnitV:
          r.record(std::abs(dc - du), delta + tol);
          break;
        case ModulusForm::OneSided:
          r.record(-dc, tol);
          r.record(dc, du + delta + tol);
          break;
        case ModulusForm::Joint:
          r.record(std::abs(dc), du + std::abs(p.v2 - p.v1) + 2 * delta + tol);
          break;
      }
    }
  }
  if (consistency > 1e-12) {
    ++r.violations;
    r.note = fmt::format("offline sweep disagrees with WeightedRankCopula by {:.3g}; ",
                         consistency);
  }
  r.note += fmt::format("n={}, {} draws x {} pairs", n, draws, pairs);
  return r;
}

SuiteResult delta_n_suite(std::size_t draws, std::size_t n, std::uint64_t seed) {
  SuiteResult r;
  r.name = "delta-n";
  Timer timer(r);
  const double bound = 3.0 * std::log(static_cast<double>(n)) / static_cast<double>(n);
  const MultiplierLaw law = MultiplierLaw::standard_exponential();
  double largest = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    Engine rng = make_stream(seed, {d});
    const double delta = draw_multipliers(law, n, rng).delta_n();
    largest = std::max(largest, delta);
    r.record(delta, bound);
  }
  r.note = fmt::format("max Δ_n = {:.4g}, bound 3 log(n)/n = {:.4g}", largest, bound);
  return r;
}

SuiteResult weighted_grid_gap_suite(std::size_t draws, std::size_t n, int m,
                                    std::size_t points, std::uint64_t seed) {
  SuiteResult r;
  r.name = "weighted-grid-gap";
  Timer timer(r);
  const MultiplierLaw law = MultiplierLaw::standard_exponential();
  for (std::size_t d = 0; d < draws; ++d) {
    Engine rng = make_stream(seed, {d});
    const EmpiricalCopula cop(ranks(test_sample(d, n, rng)));
    WeightedRankCopula weighted(cop);
    const MultiplierDraw draw = draw_multipliers(law, n, rng);
    weighted.assign(draw.xi);
    const double bound = 4.0 / m + 2.0 * weighted.delta_n() + 1e-12;
    LazyCheckerboard smooth([&](double u, double v) { return weighted(u, v); }, m);
    for (std::size_t p = 0; p < points; ++p) {
      const double u = uniform_open(rng), v = uniform_open(rng);
      r.record(std::abs(smooth(u, v) - weighted(u, v)), bound);
    }
  }
  return r;
}

std::vector<SuiteResult> selftest_suites(std::uint64_t seed) {
  std::vector<SuiteResult> out;
  out.push_back(operator_suite(20, 2000, seed));
  out.push_back(lipschitz_exact_suite(20, 2000, 2000, seed));
  out.push_back(deviation_suite(3, {8, 32, 128}, 128, seed));
  out.push_back(tail_deviation_suite(3, {8, 32, 128}, 16, seed));
  out.push_back(weighted_modulus_suite(ModulusForm::UnitV, 5, 2000, 2000, seed));
  out.push_back(weighted_modulus_suite(ModulusForm::OneSided, 5, 2000, 2000, seed));
  out.push_back(weighted_modulus_suite(ModulusForm::Joint, 5, 2000, 2000, seed));
  out.push_back(delta_n_suite(20, 10000, seed));
  out.push_back(weighted_grid_gap_suite(3, 2000, 32, 500, seed));
  return out;
}

}  // namespace cbtail

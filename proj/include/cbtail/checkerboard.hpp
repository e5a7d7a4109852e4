#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "cbtail/empirical_copula.hpp"

namespace cbtail {

template <class F>
concept BivariateFunction = requires(const F& f, double u, double v) {
  { f(u, v) } -> std::convertible_to<double>;
};

// Cell (i, j) in 1..m containing (u, v) under half-open cells
// ((i-1)/m, i/m], with i = m when u = 1, and the local coordinates
// mu_u = m u - (i - 1), mu_v = m v - (j - 1) in [0, 1].
struct CellLocation {
  int i = 1;
  int j = 1;
  double mu_u = 0.0;
  double mu_v = 0.0;
};

struct AxisLocation {
  int index = 1;
  double mu = 0.0;
};

// One coordinate of locate_cell. A query lying exactly on the grid line
// a/m (as a double) gets index a + 1 and mu = 0 exactly.
AxisLocation locate_axis(double u, int m);
CellLocation locate_cell(double u, double v, int m);

// Bilinear weights of the four corners (i-1, j-1), (i, j-1), (i-1, j), (i, j).
struct CornerWeights {
  double w00, w10, w01, w11;
};

inline CornerWeights corner_weights(const CellLocation& c) {
  const double a = 1.0 - c.mu_u;
  const double b = 1.0 - c.mu_v;
  return {a * b, c.mu_u * b, a * c.mu_v, c.mu_u * c.mu_v};
}

inline double interpolate(const CellLocation& c, double c00, double c10,
                          double c01, double c11) {
  const CornerWeights w = corner_weights(c);
  return w.w00 * c00 + w.w10 * c10 + w.w01 * c01 + w.w11 * c11;
}

inline double grid_coordinate(int i, int m) {
  return static_cast<double>(i) / static_cast<double>(m);
}

void check_resolution(int m);

// Dense (m+1) x (m+1) corner table, row-major in the first (u) index.
class CheckerboardGrid {
 public:
  CheckerboardGrid(int m, std::vector<double> corners, std::string description = {});

  int resolution() const { return m_; }
  const std::string& description() const { return description_; }
  double at(int i, int j) const {
    return corners_[static_cast<std::size_t>(i) * (m_ + 1) + j];
  }
  const std::vector<double>& corners() const { return corners_; }

  // T_m f(u, v).
  double operator()(double u, double v) const;

 private:
  int m_;
  std::vector<double> corners_;
  std::string description_;
};

inline double checkerboard_eval(const CheckerboardGrid& grid, double u, double v) {
  return grid(u, v);
}

// corners[i][j] = base(i/m, j/m). Evaluated row by row in a fixed order;
// the OpenMP kernel below produces bit-identical grids.
template <BivariateFunction F>
CheckerboardGrid build_grid_serial(const F& base, int m, std::string description = {}) {
  check_resolution(m);
  const std::size_t w = static_cast<std::size_t>(m) + 1;
  std::vector<double> corners(w * w);
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      corners[i * w + j] = base(grid_coordinate(i, m), grid_coordinate(j, m));
    }
  }
  return CheckerboardGrid(m, std::move(corners), std::move(description));
}

template <BivariateFunction F>
CheckerboardGrid build_grid_parallel(const F& base, int m, int threads,
                                     std::string description = {}) {
  check_resolution(m);
  const std::size_t w = static_cast<std::size_t>(m) + 1;
  std::vector<double> corners(w * w);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      corners[i * w + j] = base(grid_coordinate(i, m), grid_coordinate(j, m));
    }
  }
  return CheckerboardGrid(m, std::move(corners), std::move(description));
}

// Dispatches to the serial reference for threads <= 1.
template <BivariateFunction F>
CheckerboardGrid build_grid(const F& base, int m, std::string description = {},
                            int threads = 1) {
  if (threads <= 1) return build_grid_serial(base, m, std::move(description));
  return build_grid_parallel(base, m, threads, std::move(description));
}

// Corner counts #{U_i <= i/m, V_i <= j/m} in O(n + m^2) through a 2-D
// histogram and prefix sums. Agrees exactly with evaluating
// EmpiricalCopula::count at every corner.
CheckerboardGrid build_count_grid(const EmpiricalCopula& copula, int m);

// Same corners divided by n: the grid of Ĉ_n^{(m)}.
CheckerboardGrid build_empirical_grid(const EmpiricalCopula& copula, int m);

// Checkerboard smoothing that evaluates corners on demand and memoises them.
// Safe for concurrent evaluation; agrees exactly with the dense grid built
// from the same base.
template <BivariateFunction F>
class LazyCheckerboard {
 public:
  LazyCheckerboard(F base, int m) : base_(std::move(base)), m_(m) {
    check_resolution(m);
  }

  int resolution() const { return m_; }

  double corner(int i, int j) const {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
    {
      std::lock_guard lock(mutex_);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    const double value = base_(grid_coordinate(i, m_), grid_coordinate(j, m_));
    std::lock_guard lock(mutex_);
    memo_.emplace(key, value);
    return value;
  }

  double operator()(double u, double v) const {
    const CellLocation c = locate_cell(u, v, m_);
    return interpolate(c, corner(c.i - 1, c.j - 1), corner(c.i, c.j - 1),
                       corner(c.i - 1, c.j), corner(c.i, c.j));
  }

  std::size_t cached_corners() const {
    std::lock_guard lock(mutex_);
    return memo_.size();
  }

 private:
  F base_;
  int m_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::uint64_t, double> memo_;
};

// Text layout:
//   cbtail-grid 1
//   m <m>
//   base <description>
//   (m+1) lines of (m+1) space-separated corners, row i = u index
void write_grid(std::ostream& out, const CheckerboardGrid& grid);
CheckerboardGrid read_grid(std::istream& in);

}  // namespace cbtail

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "cbtail/checkerboard.hpp"
#include "cbtail/copula_models.hpp"
#include "cbtail/errors.hpp"
#include "cbtail/property_suites.hpp"
#include "cbtail/rng.hpp"

using namespace cbtail;

namespace {

const auto product = [](double u, double v) { return u * v; };
const auto minimum = [](double u, double v) { return std::min(u, v); };

EmpiricalCopula clayton_copula(std::size_t n, std::uint64_t seed) {
  Engine rng = make_stream(seed, {0});
  return EmpiricalCopula(ranks(sample(CopulaModel::clayton(1.0), n, rng)));
}

double max_interior_error(const CopulaModel& model, int m) {
  const auto cdf = [&](double u, double v) { return copula_cdf(model, u, v); };
  const auto grid = build_grid(cdf, m);
  double worst = 0.0;
  constexpr int probe = 161;
  for (int a = 0; a < probe; ++a) {
    for (int b = 0; b < probe; ++b) {
      const double u = 0.1 + 0.8 * a / (probe - 1), v = 0.1 + 0.8 * b / (probe - 1);
      worst = std::max(worst, std::abs(grid(u, v) - cdf(u, v)));
    }
  }
  return worst;
}

}  // namespace

TEST(LocateCell, Examples) {
  const auto a = locate_cell(0.3, 0.3, 4);
  EXPECT_EQ(a.i, 2);
  EXPECT_NEAR(a.mu_u, 0.2, 1e-15);
  const auto b = locate_cell(1.0, 1.0, 4);
  EXPECT_EQ(b.i, 4);
  EXPECT_EQ(b.mu_u, 1.0);
  const auto c = locate_cell(0.25, 0.0, 4);
  EXPECT_EQ(c.i, 2);
  EXPECT_EQ(c.mu_u, 0.0);
  EXPECT_EQ(c.j, 1);
  EXPECT_EQ(c.mu_v, 0.0);
}

TEST(LocateCell, GridLinesHaveZeroLocalCoordinate) {
  for (int m : {1, 3, 7, 10, 437, 1584}) {
    for (int a = 0; a < m; ++a) {
      const auto loc = locate_axis(grid_coordinate(a, m), m);
      EXPECT_EQ(loc.index, a + 1) << m << " " << a;
      EXPECT_EQ(loc.mu, 0.0) << m << " " << a;
    }
    EXPECT_EQ(locate_axis(1.0, m).index, m);
  }
}

TEST(LocateCell, RejectsBadInput) {
  EXPECT_THROW(locate_cell(0.5, 0.5, 0), DomainError);
  EXPECT_THROW(locate_cell(1.2, 0.5, 4), DomainError);
  EXPECT_THROW(locate_cell(0.5, -0.1, 4), DomainError);
}

TEST(CheckerboardEval, IndependenceReproducedExactly) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int m : {1, 2, 5, 16, 100}) {
    const auto grid = build_grid(product, m);
    for (int q = 0; q < 1000; ++q) {
      const double u = U(g), v = U(g);
      EXPECT_NEAR(checkerboard_eval(grid, u, v), u * v, 4e-16);
    }
  }
}

TEST(CheckerboardEval, ComonotoneMidCell) {
  const auto grid = build_grid(minimum, 2);
  EXPECT_EQ(checkerboard_eval(grid, 0.25, 0.25), 0.125);
}

TEST(CheckerboardEval, GridPointsExact) {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int m : {1, 4, 9, 33}) {
    std::vector<double> corners((m + 1) * (m + 1));
    for (auto& c : corners) c = U(g);
    const CheckerboardGrid grid(m, corners);
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) {
        EXPECT_EQ(grid(grid_coordinate(i, m), grid_coordinate(j, m)), grid.at(i, j));
      }
    }
  }
}

TEST(CheckerboardEval, InteriorGridLinesAgreeWithLeftCell) {
  // On u = a/m the cell to the right (mu = 0) and the cell to the left
  // (mu = 1) give the same interpolant.
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int m = 12;
  std::vector<double> corners((m + 1) * (m + 1));
  for (auto& c : corners) c = U(g);
  const CheckerboardGrid grid(m, corners);
  for (int a = 1; a < m; ++a) {
    for (double v : {0.03, 0.5, 0.91}) {
      const AxisLocation right = locate_axis(grid_coordinate(a, m), m);
      const AxisLocation vloc = locate_axis(v, m);
      CellLocation left{a, vloc.index, 1.0, vloc.mu};
      const double from_left = interpolate(left, grid.at(a - 1, vloc.index - 1),
                                           grid.at(a, vloc.index - 1), grid.at(a - 1, vloc.index),
                                           grid.at(a, vloc.index));
      EXPECT_EQ(right.index, a + 1);
      EXPECT_NEAR(grid(grid_coordinate(a, m), v), from_left, 1e-15);
    }
  }
}

TEST(BuildGrid, ProductCorners) {
  const auto grid = build_grid(product, 3);
  for (int i = 0; i <= 3; ++i) {
    for (int j = 0; j <= 3; ++j) EXPECT_DOUBLE_EQ(grid.at(i, j), i * j / 9.0);
  }
}

TEST(BuildGrid, FourPointEmpiricalRow) {
  const EmpiricalCopula c(ranks({{1, 2, 3, 4}, {2, 1, 4, 3}}));
  const auto grid = build_empirical_grid(c, 2);
  EXPECT_EQ(grid.at(1, 0), 0.0);
  EXPECT_EQ(grid.at(1, 1), 0.5);
  EXPECT_EQ(grid.at(1, 2), 0.5);
  EXPECT_EQ(grid.at(2, 2), 1.0);
}

TEST(BuildGrid, CheckerboardOfCopulaIsCopula) {
  const auto model = CopulaModel::clayton(2.0);
  const auto grid = build_grid([&](double u, double v) { return copula_cdf(model, u, v); }, 7);
  for (int i = 0; i <= 7; ++i) {
    EXPECT_NEAR(grid.at(0, i), 0.0, 1e-15);
    EXPECT_NEAR(grid.at(i, 0), 0.0, 1e-15);
    EXPECT_NEAR(grid.at(7, i), i / 7.0, 1e-12);
    EXPECT_NEAR(grid.at(i, 7), i / 7.0, 1e-12);
  }
  constexpr int g = 40;
  for (int a = 0; a <= g; ++a) {
    const double u = a / double(g);
    EXPECT_NEAR(grid(u, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(grid(u, 1.0), u, 1e-12);
    EXPECT_NEAR(grid(1.0, u), u, 1e-12);
  }
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      const double u1 = a / double(g), u2 = (a + 1) / double(g);
      const double v1 = b / double(g), v2 = (b + 1) / double(g);
      EXPECT_GE(grid(u2, v2) - grid(u1, v2) - grid(u2, v1) + grid(u1, v1), -1e-12);
    }
  }
}

TEST(BuildGrid, EmpiricalGridInvariants) {
  const auto c = clayton_copula(997, 4);
  for (int m : {1, 10, 64, 997, 2000}) {
    const auto grid = build_empirical_grid(c, m);
    EXPECT_EQ(grid.at(m, m), 1.0);
    for (int j = 0; j <= m; ++j) {
      EXPECT_EQ(grid.at(0, j), 0.0);
      EXPECT_EQ(grid.at(j, 0), 0.0);
      EXPECT_EQ(grid.at(m, j), double(rank_threshold(997, grid_coordinate(j, m))) / 997.0);
    }
  }
}

TEST(BuildGrid, CountGridMatchesDirectCounts) {
  const auto c = clayton_copula(500, 5);
  for (int m : {3, 17, 128, 500, 777}) {
    const auto grid = build_count_grid(c, m);
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) {
        ASSERT_EQ(grid.at(i, j),
                  double(c.count(grid_coordinate(i, m), grid_coordinate(j, m))))
            << m << " " << i << " " << j;
      }
    }
  }
}

TEST(BuildGrid, SerialAndParallelIdentical) {
  const auto c = clayton_copula(1500, 6);
  const auto f = [&](double u, double v) { return c(u, v); };
  for (int m : {1, 31, 200}) {
    const auto s = build_grid_serial(f, m);
    for (int threads : {2, 4, 8}) {
      EXPECT_EQ(build_grid_parallel(f, m, threads).corners(), s.corners());
    }
    EXPECT_EQ(build_grid(f, m, "", 3).corners(), s.corners());
  }
}

TEST(BuildGrid, LazyMatchesDense) {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto c = clayton_copula(800, 7);
  const auto f = [&](double u, double v) { return c(u, v); };
  const int m = 57;
  const auto dense = build_grid(f, m);
  LazyCheckerboard lazy(f, m);
  for (int q = 0; q < 2000; ++q) {
    const double u = U(g), v = U(g);
    EXPECT_EQ(lazy(u, v), dense(u, v));
  }
  EXPECT_LE(lazy.cached_corners(), std::size_t(m + 1) * (m + 1));
}

TEST(BuildGrid, Linearity) {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int m = 20;
  std::vector<double> f((m + 1) * (m + 1)), h(f.size()), mix(f.size());
  for (auto& x : f) x = U(g);
  for (auto& x : h) x = U(g);
  const double a = 0.7, b = -2.3;
  for (std::size_t i = 0; i < f.size(); ++i) mix[i] = a * f[i] + b * h[i];
  const CheckerboardGrid F(m, f), H(m, h), M(m, mix);
  for (int q = 0; q < 5000; ++q) {
    const double u = (U(g) + 1) / 2, v = (U(g) + 1) / 2;
    EXPECT_NEAR(M(u, v), a * F(u, v) + b * H(u, v), 1e-12);
  }
}

TEST(OperatorSuite, NoViolations) {
  const SuiteResult r = operator_suite(40, 2000, 9);
  EXPECT_EQ(r.violations, 0u) << r.worst;
  EXPECT_GT(r.checks, 0u);
}

TEST(DeviationBound, FourOverM) {
  const SuiteResult r = deviation_suite(4, {8, 32, 128}, 128, 10);
  EXPECT_EQ(r.violations, 0u) << r.worst;
}

TEST(DeviationBound, TailRescaled) {
  const SuiteResult r = tail_deviation_suite(4, {8, 32, 128}, 24, 11);
  EXPECT_EQ(r.violations, 0u) << r.worst;
}

TEST(BiasOrder, IndependenceIsExact) {
  EXPECT_LT(max_interior_error(CopulaModel::independence(), 16), 1e-15);
  EXPECT_LT(max_interior_error(CopulaModel::independence(), 32), 1e-15);
}

TEST(BiasOrder, ClaytonQuadratic) {
  const auto model = CopulaModel::clayton(1.0);
  const double K = max_interior_error(model, 16) * 16 * 16;
  EXPECT_LE(max_interior_error(model, 32), 1.1 * K / (32.0 * 32.0));
}

TEST(GridIo, RoundTrip) {
  const auto c = clayton_copula(321, 12);
  const auto grid = build_empirical_grid(c, 19);
  std::stringstream ss;
  write_grid(ss, CheckerboardGrid(19, grid.corners(), "empirical n=321"));
  const auto back = read_grid(ss);
  EXPECT_EQ(back.resolution(), 19);
  EXPECT_EQ(back.corners(), grid.corners());
  EXPECT_EQ(back.description(), "empirical n=321");
}

TEST(GridIo, RejectsMalformedInput) {
  std::istringstream bad_magic("not-a-grid 1\nm 1\nbase x\n0 0\n0 1\n");
  EXPECT_THROW(read_grid(bad_magic), IoError);
  std::istringstream short_rows("cbtail-grid 1\nm 2\nbase x\n0 0 0\n0 1 1\n");
  EXPECT_THROW(read_grid(short_rows), IoError);
  std::istringstream bad_number("cbtail-grid 1\nm 1\nbase x\n0 zero\n0 1\n");
  EXPECT_THROW(read_grid(bad_number), IoError);
}

TEST(CheckerboardGrid, RejectsWrongSize) {
  EXPECT_THROW(CheckerboardGrid(2, std::vector<double>(8)), DomainError);
  EXPECT_THROW(build_grid(product, 0), DomainError);
}

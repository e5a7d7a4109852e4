#include "cbtail/checkerboard.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cbtail/errors.hpp"

namespace cbtail {

void check_resolution(int m) {
  if (m < 1) throw DomainError(fmt::format("checkerboard resolution must be >= 1, got {}", m));
}

AxisLocation locate_axis(double u, int m) {
  check_resolution(m);
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError(fmt::format("checkerboard query must lie in [0, 1], got {}", u));
  }
  if (u == 1.0) return {m, 1.0};
  const double dm = static_cast<double>(m);
  int a = static_cast<int>(std::floor(u * dm));
  a = std::clamp(a, 0, m - 1);
  while (a + 1 <= m - 1 && grid_coordinate(a + 1, m) <= u) ++a;
  while (a > 0 && grid_coordinate(a, m) > u) --a;
  if (grid_coordinate(a, m) == u) return {a + 1, 0.0};
  return {a + 1, std::clamp(u * dm - a, 0.0, 1.0)};
}

CellLocation locate_cell(double u, double v, int m) {
  const AxisLocation x = locate_axis(u, m);
  const AxisLocation y = locate_axis(v, m);
  return {x.index, y.index, x.mu, y.mu};
}

CheckerboardGrid::CheckerboardGrid(int m, std::vector<double> corners,
                                   std::string description)
    : m_(m), corners_(std::move(corners)), description_(std::move(description)) {
  check_resolution(m);
  const std::size_t w = static_cast<std::size_t>(m) + 1;
  if (corners_.size() != w * w) {
    throw DomainError(fmt::format("grid of resolution {} needs {} corners, got {}",
                                  m, w * w, corners_.size()));
  }
}

double CheckerboardGrid::operator()(double u, double v) const {
  const CellLocation c = locate_cell(u, v, m_);
  return interpolate(c, at(c.i - 1, c.j - 1), at(c.i, c.j - 1),
                     at(c.i - 1, c.j), at(c.i, c.j));
}

CheckerboardGrid build_count_grid(const EmpiricalCopula& copula, int m) {
  check_resolution(m);
  const std::size_t n = copula.size();
  const std::size_t w = static_cast<std::size_t>(m) + 1;

  // bucket[r] = smallest a with rank_threshold(n, a/m) >= r.
  std::vector<std::uint32_t> bucket(n + 1, 0);
  std::size_t r = 1;
  for (int a = 0; a <= m && r <= n; ++a) {
    const std::size_t thr = rank_threshold(n, grid_coordinate(a, m));
    for (; r <= thr; ++r) bucket[r] = static_cast<std::uint32_t>(a);
  }

  std::vector<double> counts(w * w, 0.0);
  auto y_of_x = copula.y_rank_by_x_rank();
  for (std::size_t rx = 1; rx <= n; ++rx) {
    counts[bucket[rx] * w + bucket[y_of_x[rx]]] += 1.0;
  }
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = 1; j < w; ++j) counts[i * w + j] += counts[i * w + j - 1];
  }
  for (std::size_t i = 1; i < w; ++i) {
    for (std::size_t j = 0; j < w; ++j) counts[i * w + j] += counts[(i - 1) * w + j];
  }
  return CheckerboardGrid(m, std::move(counts), "empirical-counts");
}

CheckerboardGrid build_empirical_grid(const EmpiricalCopula& copula, int m) {
  const CheckerboardGrid counts = build_count_grid(copula, m);
  std::vector<double> corners = counts.corners();
  const double n = static_cast<double>(copula.size());
  for (double& c : corners) c /= n;
  return CheckerboardGrid(m, std::move(corners), "empirical-copula");
}

void write_grid(std::ostream& out, const CheckerboardGrid& grid) {
  const int m = grid.resolution();
  fmt::print(out, "cbtail-grid 1\nm {}\nbase {}\n", m,
             grid.description().empty() ? "unspecified" : grid.description());
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      fmt::print(out, "{}{:.17g}", j == 0 ? "" : " ", grid.at(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed to write checkerboard grid");
}

CheckerboardGrid read_grid(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "cbtail-grid" || version != 1) {
    throw IoError("not a cbtail-grid v1 stream");
  }
  std::string key;
  int m = 0;
  if (!(in >> key >> m) || key != "m") throw IoError("grid header lacks 'm'");
  check_resolution(m);
  if (!(in >> key) || key != "base") throw IoError("grid header lacks 'base'");
  std::string description;
  std::getline(in, description);
  if (!description.empty() && description.front() == ' ') description.erase(0, 1);
  if (description == "unspecified") description.clear();

  const std::size_t w = static_cast<std::size_t>(m) + 1;
  std::vector<double> corners(w * w);
  for (auto& c : corners) {
    if (!(in >> c)) throw IoError("grid body truncated");
  }
  return CheckerboardGrid(m, std::move(corners), std::move(description));
}

}  // namespace cbtail

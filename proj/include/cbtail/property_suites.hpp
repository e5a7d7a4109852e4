#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cbtail {

// Outcome of a randomized property check: `checks` inequalities were
// evaluated, `violations` of them failed. `worst` is the largest observed
// excess of lhs over rhs (negative when every check held with room).
struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst = -1e300;
  double seconds = 0.0;
  std::string note;

  bool pass() const { return violations == 0; }
  void record(double lhs, double rhs);
};

// T_m on `functions` random grids (m in 1..64, corners uniform in [-1, 1])
// at `queries` random points each: contraction |T_m f| <= sup |f|,
// nonnegative weights summing to 1, exact reproduction of bilinear f and of
// grid values. Rounding slack: 8 ulp of the compared magnitude.
SuiteResult operator_suite(std::size_t functions, std::size_t queries, std::uint64_t seed);

// |Ĉ_n(u2, v2) - Ĉ_n(u1, v1)| <= 2 (|du| + |dv|) on `samples` samples with
// n = n_max * (s+1) / samples and `pairs` i.i.d. uniform point pairs each.
SuiteResult lipschitz_suite(std::size_t samples, std::size_t n_max, std::size_t pairs,
                            std::uint64_t seed);
// Same design against the bound |du| + |dv| + 2/n, which holds for every
// pair (a rank interval of length d holds at most n d + 1 ranks).
SuiteResult lipschitz_exact_suite(std::size_t samples, std::size_t n_max, std::size_t pairs,
                                  std::uint64_t seed);

// sup over a probe x probe grid on [0,1]^2 of |Ĉ_n^{(m)} - Ĉ_n| <= 4/m,
// `samples` random samples of size n in [200, 2000] for every m.
SuiteResult deviation_suite(std::size_t samples, const std::vector<int>& ms, int probe,
                            std::uint64_t seed);
// |Λ̂^{(m)} - Λ̂^{raw}| <= 4n/(k m) over a probe grid of (x, y) in
// [0, n/k]^2 for both tails, k drawn in [n^0.4, n/2].
SuiteResult tail_deviation_suite(std::size_t samples, const std::vector<int>& ms, int probe,
                                 std::uint64_t seed);

// Which weighted-copula modulus inequality to test at random pairs.
enum class ModulusForm {
  AsStated,   // |{C(u2,v) - C(u1,v)} - (u2-u1)| <= Δ_n at random v
  UnitV,      // the same at v = 1
  OneSided,   // -tol <= C(u2,v) - C(u1,v) <= (u2-u1) + Δ_n at random v
  Joint,      // |C(u2,v2) - C(u1,v1)| <= |du| + |dv| + 2Δ_n
};

// `draws` multiplier draws (standard exponential) on a Clayton(1) sample of
// size n, `pairs` random pairs per draw.
SuiteResult weighted_modulus_suite(ModulusForm form, std::size_t draws, std::size_t n,
                                   std::size_t pairs, std::uint64_t seed);

// Δ_n <= 3 log(n) / n for each of `draws` standard exponential draws.
SuiteResult delta_n_suite(std::size_t draws, std::size_t n, std::uint64_t seed);

// |T_m Ĉ^{ξ,ξ} - Ĉ^{ξ,ξ}| <= 4/m + 2Δ_n at random points, one draw per sample.
SuiteResult weighted_grid_gap_suite(std::size_t draws, std::size_t n, int m,
                                    std::size_t points, std::uint64_t seed);

// The suites run by `cbtail selftest`, sized to finish in seconds. Only
// inequalities that hold for every sample are included.
std::vector<SuiteResult> selftest_suites(std::uint64_t seed);

}  // namespace cbtail

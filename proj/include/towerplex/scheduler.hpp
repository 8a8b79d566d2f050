#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "towerplex/rank_one.hpp"
#include "towerplex/stats.hpp"

namespace towerplex {

using Partition = std::vector<IntervalSet>;

/// Canonical enumeration of nonzero-integer vectors: ascending by (length,
/// max |entry|, lexicographic with -k ordered before +k).
std::vector<std::vector<int>> enumerate_vectors(std::size_t count, std::size_t max_len,
                                                std::size_t max_abs);

struct MSearchResult {
  std::uint64_t m = 0;
  Rat worst_sum;  // largest normalized sum over all cells and vectors at N = m
};

struct MSearchRequest {
  const PiecewiseAffineMap& r_map;
  Rat mu_x;
  const Partition& cells;
  Rat delta;
  std::vector<std::vector<int>> vectors;  // v_1 .. v_{j_n}
  std::uint64_t floor = 1;                // max{h_{n-1}, M_{n-1}}
  std::uint64_t search_cap = 4096;
  std::optional<RigiditySequence> rho;
  bool check_rigidity = false;
  PieceBudget budget;
};

/// Smallest M in (floor, cap] such that every cell and every listed vector
/// satisfies the scaled product sum < delta at N = M (plus the optional
/// rigidity predicate). Throws SearchCapExceeded with the best sum achieved.
MSearchResult choose_m(const MSearchRequest& req);

/// eps_n = largest power of 1/2 strictly below eps_prev / (n M);
/// h_n = smallest power of 2 strictly above max(n M / eps_prev, M).
std::pair<Rat, std::uint64_t> choose_eps_h(std::uint64_t m, int n, const Rat& eps_prev);

/// Emitted stage parameters; validate() checks the structural inequalities
/// M_n > max{h_{n-1}, M_{n-1}}, eps_n n M_n < eps_{n-1} and
/// (1/h_n) n M_n < eps_{n-1} with exact comparisons.
struct ScheduleParams {
  std::vector<Rat> delta;
  std::vector<std::uint64_t> m;
  std::vector<Rat> eps;
  std::vector<std::uint64_t> h;
  std::vector<std::size_t> j;
  Rat eps0{1};

  void validate() const;
};

}  // namespace towerplex

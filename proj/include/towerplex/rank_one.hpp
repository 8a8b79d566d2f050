#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "towerplex/piecewise_map.hpp"

namespace towerplex {

/// Cut/spacer description of a rank-one cutting-and-stacking construction.
/// Stage m cuts the current column into cuts[m] subcolumns, puts spacers[m][j]
/// spacer levels on top of subcolumn j, and stacks left to right.
struct RankOneSpec {
  std::vector<std::uint32_t> cuts;                  // r_m >= 2
  std::vector<std::vector<std::uint32_t>> spacers;  // one count per subcolumn
  Interval initial_base{Rat(0), Rat(1)};

  static RankOneSpec odometer(std::size_t stages);
  static RankOneSpec chacon(std::size_t stages);

  void validate() const;
};

/// A built stage of the construction: the column map (slope-1 bijection of
/// `space`, closed up by the top-to-bottom wraparound piece), its levels
/// bottom to top, and the native tower data.
struct RankOneSystem {
  RankOneSpec spec;
  std::size_t stage = 0;
  PiecewiseAffineMap map;
  Interval tower_base{Rat(0), Rat(1)};
  std::uint64_t tower_height = 1;
  IntervalSet space;
  std::vector<Interval> levels;
};

RankOneSystem build_rank_one(const RankOneSpec& spec, std::size_t m,
                             const PieceBudget& budget = {});

/// Height-h tower for sys.map obtained by grouping native levels: base
/// collects every h-th level, residual is the leftover top group. Throws
/// ResidualTooLarge when measure(residual) >= eps.
std::pair<IntervalSet, IntervalSet> rokhlin_tower(const RankOneSystem& sys, std::uint64_t h,
                                                  const Rat& eps);

/// Strictly increasing sequence of return times used for rigidity checks.
struct RigiditySequence {
  std::vector<std::uint64_t> terms;

  void validate() const;
};

/// Denominators q_k of the continued-fraction convergents of
/// [0; cf_1, cf_2, ...]: q_k = cf_k q_{k-1} + q_{k-2}, q_0 = 1, q_{-1} = 0.
RigiditySequence convergent_denominators(const std::vector<std::uint64_t>& cf, std::size_t count);

/// Density #(A ∩ {1..k}) / k.
Rat density(const RigiditySequence& a, std::uint64_t k);

}  // namespace towerplex

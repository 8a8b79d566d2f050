#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "towerplex/rank_one.hpp"

namespace towerplex {

using Partition = std::vector<IntervalSet>;

/// Which formula fixes the transfer amount d_n. Uniform makes the stage
/// contraction tau_n a single-slope map (measure scaling with ratio
/// mu(X_n)/mu(X_{n+1}) everywhere), so the conjugated map stays exactly
/// Lebesgue preserving. Literal solves
///   (mu(E)+d) / (mu(X)+mu(Y)-d) = mu(E)/mu(X)
/// instead, which splits tau_n into two slopes and breaks exact measure
/// preservation; it is kept for fidelity experiments.
enum class TransferMode { Uniform, Literal };

struct SCycle {
  PiecewiseAffineMap S;
  Interval Y;
  Interval J;  // base subinterval of the cycle
  Rat b;       // right endpoint of Y
};

/// Cycle on h consecutive subintervals of Y = [b_prev, b_prev + 1/n), each of
/// length 1/(n h): shift by 1/(n h), last subinterval wraps to the first.
SCycle build_s_cycle(int n, std::uint64_t h, const Rat& b_prev);

/// Transfer amount d for the stage. Uniform: d = E*Y/X. Literal: d = E*Y/(X+E).
Rat solve_transfer(const Rat& mu_e, const Rat& mu_x, const Rat& mu_y, TransferMode mode);

/// Leftmost subinterval of J with measure |d|/h (the transfer base I*).
IntervalSet select_transfer_set(const Interval& j_base, const Rat& d, std::uint64_t h);

struct PartitionBuild {
  Partition cells;    // partition of the tower base (C_n)
  Partition p_prime;  // tower images of cells plus the S-cycle levels (P'_n)
};

/// cells = common refinement on `base` of the pullbacks R^{-k}(p ∩ level_k)
/// over 0 <= k < h and p in p_prev (plus the part of each level not covered
/// by p_prev). p_prime lists R^k(c) level-major, then the S-levels
/// S^k(J \ I*).
PartitionBuild build_partitions(const PiecewiseAffineMap& r_map, const IntervalSet& base,
                                std::uint64_t h, const Partition& p_prev,
                                const PiecewiseAffineMap& s_map, const IntervalSet& j_minus_istar,
                                const PieceBudget& budget = {});

struct TauContext {
  const IntervalSet& x_cur;     // X_n
  const IntervalSet& residual;  // E_n
  const IntervalSet& base;      // tower base I_n
  std::uint64_t h;
  const PiecewiseAffineMap& r_map;  // R_n
  const PiecewiseAffineMap& s_map;  // S_n
  const IntervalSet& j_minus_istar;
  const IntervalSet& x_prime;
  const Partition& cells;  // C_n
  Rat slope_tower;         // contraction on the tower part
  Rat slope_residual;      // contraction X' -> E (equal to slope_tower in uniform mode)
};

/// The stage contraction tau_n : X_{n+1} -> X_n. On the new tower base each
/// cell c of C_n fills c ∩ I_n from the left and J \ I* fills the remaining
/// holes left to right; level i is transported by R^i from the base; X' maps
/// onto E order-preservingly.
PiecewiseAffineMap build_tau(const TauContext& ctx, const PieceBudget& budget = {});

struct StageState {
  int n = 0;
  IntervalSet x;  // X_n
  PiecewiseAffineMap r;
  PiecewiseAffineMap psi;  // conjugacy to stage 1: psi_n = tau_1 ∘ ... ∘ tau_{n-1}
  Partition approx;        // approximating partition for scheduling (P'_{n-1})
  Rat b_prev;

  // Set at activation (scheduling + S-cycle construction).
  bool activated = false;
  std::uint64_t big_m = 0;
  Rat delta;
  std::size_t j_count = 1;
  Rat eps;
  std::uint64_t h = 0;
  std::optional<Interval> y;
  std::optional<Interval> j_base;
  Rat b;
  PiecewiseAffineMap s;
  Rat search_value;  // largest scheduler sum recorded at N = M

  // Set when the next stage is built.
  bool multiplexed = false;
  IntervalSet tower_base;  // I_n
  IntervalSet residual;    // E_n
  Rat d;
  IntervalSet istar;
  IntervalSet x_prime;
  Partition cells;    // C_n
  Partition p_prime;  // P'_n
  Partition q;        // Q_n = tau_n(P'_n)
  PiecewiseAffineMap tau;
  IntervalSet change_set;  // D_n
};

/// Schedule inputs per stage; empty vectors mean "choose automatically".
struct ChainSchedule {
  std::vector<Rat> delta;               // default 2^-n
  std::vector<std::uint64_t> m_over;    // M_n override
  std::vector<Rat> eps_over;            // eps_n override
  std::vector<std::uint64_t> h_over;    // h_n override
  std::uint64_t search_cap = 4096;
  std::size_t vector_budget = 2;        // cap on j_n
  std::size_t vector_max_len = 3;
  std::size_t vector_max_abs = 3;
  bool check_rigidity = false;
  std::optional<RigiditySequence> rho;
  bool stage1_tower_partition = false;  // use starter tower base instead of {X_1}
};

class Chain {
 public:
  Chain(RankOneSystem starter, TransferMode mode, ChainSchedule schedule,
        PieceBudget budget = {});

  /// Activates stages and multiplexes until `count` stages exist, the last
  /// one activated but not multiplexed.
  void build_to(int count);

  const std::vector<StageState>& stages() const { return stages_; }
  const StageState& stage(int n) const;
  StageState& stage_mutable(int n);
  int built_stages() const { return static_cast<int>(stages_.size()); }

  /// T_n = R_n on X_n joined with S_n on Y_n. Stage n must be activated.
  PiecewiseAffineMap assemble_t(int n) const;

  const Rat& kappa() const { return kappa_; }
  const RankOneSystem& starter() const { return starter_; }
  TransferMode mode() const { return mode_; }
  const ChainSchedule& schedule() const { return schedule_; }
  const PieceBudget& budget() const { return budget_; }

  /// Restores a chain from previously serialized stages (resume path).
  void adopt_stages(std::vector<StageState> stages, Rat kappa);

  void activate(int n);
  void multiplex_last();

 private:
  RankOneSystem starter_;
  TransferMode mode_;
  ChainSchedule schedule_;
  PieceBudget budget_;
  std::vector<StageState> stages_;
  Rat kappa_;
};

/// Exact measure of the set of points of A whose first M iterates under the
/// deepest built T agree with their iterates under T_{n+1}.
Rat stable_horizon(const Chain& chain, const IntervalSet& a, int n, std::uint64_t m);

}  // namespace towerplex

#include "towerplex/chain.hpp"

#include <algorithm>

#include "towerplex/errors.hpp"
#include "towerplex/scheduler.hpp"

namespace towerplex {

SCycle build_s_cycle(int n, std::uint64_t h, const Rat& b_prev) {
  if (n < 1 || h < 2) throw Error(ErrorCode::ConfigInvalid, "cycle needs n >= 1 and h >= 2");
  Rat width = Rat(1, n) / Rat(static_cast<long>(h));
  Rat b = b_prev + Rat(1, n);
  std::vector<AffinePiece> pieces;
  pieces.reserve(h);
  Rat last_lo = b_prev + width * Rat(static_cast<long>(h - 1));
  pieces.push_back({Interval(b_prev, last_lo), Rat(1), width});
  pieces.push_back({Interval(last_lo, b), Rat(1), b_prev - last_lo});
  SCycle out{PiecewiseAffineMap::from_pieces(std::move(pieces)), Interval(b_prev, b),
             Interval(b_prev, b_prev + width), b};
  return out;
}

Rat solve_transfer(const Rat& mu_e, const Rat& mu_x, const Rat& mu_y, TransferMode mode) {
  if (mu_e.sign() < 0 || mu_x.sign() <= 0 || mu_y.sign() <= 0)
    throw Error(ErrorCode::ConfigInvalid, "transfer needs E >= 0, X > 0, Y > 0");
  if (mode == TransferMode::Literal) return mu_e * mu_y / (mu_x + mu_e);
  return mu_e * mu_y / mu_x;
}

IntervalSet select_transfer_set(const Interval& j_base, const Rat& d, std::uint64_t h) {
  if (h == 0) throw Error(ErrorCode::ConfigInvalid, "tower height must be positive");
  Rat slice = d.abs() / Rat(static_cast<long>(h));
  if (slice > j_base.length())
    throw Error(ErrorCode::TransferTooLarge,
                "transfer slice " + slice.str() + " exceeds the cycle base length " +
                    j_base.length().str());
  if (slice.is_zero()) return {};
  return IntervalSet(Interval(j_base.lo, j_base.lo + slice));
}

PartitionBuild build_partitions(const PiecewiseAffineMap& r_map, const IntervalSet& base,
                                std::uint64_t h, const Partition& p_prev,
                                const PiecewiseAffineMap& s_map, const IntervalSet& j_minus_istar,
                                const PieceBudget& budget) {
  PartitionBuild out;
  out.cells = {base};

  PiecewiseAffineMap r_inv = invert(r_map);
  PiecewiseAffineMap back;  // R^{-k}، built incrementally
  IntervalSet level = base;

  auto refine_by = [&](const IntervalSet& part) {
    if (part.empty()) return;
    Partition next;
    next.reserve(out.cells.size() + 4);
    for (const auto& cell : out.cells) {
      IntervalSet inside = set_intersect(cell, part);
      IntervalSet outside = set_difference(cell, part);
      if (!inside.empty()) next.push_back(std::move(inside));
      if (!outside.empty()) next.push_back(std::move(outside));
    }
    out.cells = std::move(next);
    std::size_t total = 0;
    for (const auto& c : out.cells) total += c.size();
    budget.check(total);
  };

  for (std::uint64_t k = 0; k < h; ++k) {
    if (k > 0) {
      level = image(r_map, level);
      back = (k == 1) ? r_inv : compose(back, r_inv, budget);
      // back = R^{-1} ∘ ... applied after reaching level k means pulling a
      // level-k subset down k steps: back == R^{-k} restricted suitably.
    }
    IntervalSet rest = level;
    for (const auto& p : p_prev) {
      IntervalSet part = set_intersect(level, p);
      rest = set_difference(rest, p);
      if (part.empty()) continue;
      refine_by(k == 0 ? part : image(back, part));
    }
    if (!rest.empty()) refine_by(k == 0 ? rest : image(back, rest));
  }

  // Deterministic cell order: by leftmost point.
  std::sort(out.cells.begin(), out.cells.end(),
            [](const IntervalSet& a, const IntervalSet& b) { return a.lower() < b.lower(); });

  out.p_prime.reserve(h * out.cells.size() + h);
  IntervalSet r_level;
  for (std::uint64_t k = 0; k < h; ++k) {
    for (const auto& cell : out.cells) {
      if (k == 0) {
        out.p_prime.push_back(cell);
      } else {
        std::size_t idx = out.p_prime.size() - out.cells.size();
        out.p_prime.push_back(image(r_map, out.p_prime[idx]));
      }
    }
  }
  if (!j_minus_istar.empty()) {
    IntervalSet s_level = j_minus_istar;
    for (std::uint64_t k = 0; k < h; ++k) {
      if (k > 0) s_level = image(s_map, s_level);
      out.p_prime.push_back(s_level);
    }
  }
  std::size_t total = 0;
  for (const auto& p : out.p_prime) total += p.size();
  budget.check(total);
  return out;
}

namespace {

// Composition wrapper for the conjugation R^i ∘ tau_base ∘ (branch)^{-i}.
PiecewiseAffineMap conjugate_level(const PiecewiseAffineMap& fwd_i,
                                   const PiecewiseAffineMap& tau_base,
                                   const PiecewiseAffineMap& inv_i, const IntervalSet& level,
                                   const PieceBudget& budget) {
  PiecewiseAffineMap down = restrict(inv_i, level, budget);
  PiecewiseAffineMap mid = compose(tau_base, down, budget);
  return compose(fwd_i, mid, budget);
}

}  // namespace

PiecewiseAffineMap build_tau(const TauContext& ctx, const PieceBudget& budget) {
  std::vector<AffinePiece> pieces;

  // Base fill: each cell c of C fills c ∩ I from the left; J \ I* fills the
  // remaining holes left to right.
  std::vector<AffinePiece> base_pieces;
  std::vector<Interval> filled;
  for (const auto& cell : ctx.cells) {
    Rat target_measure = ctx.slope_tower * cell.measure();
    IntervalSet target = prefix_of_measure(cell, target_measure);
    PiecewiseAffineMap fill = order_preserving_scale_map(cell, target, ctx.slope_tower, budget);
    for (const auto& p : fill.pieces()) base_pieces.push_back(p);
    for (const auto& iv : target.intervals()) filled.push_back(iv);
  }
  IntervalSet holes =
      set_difference(ctx.base, IntervalSet::from_intervals(std::move(filled)));
  if (!ctx.j_minus_istar.empty() || !holes.empty()) {
    if (!(holes.measure() == ctx.slope_tower * ctx.j_minus_istar.measure()))
      throw Error(ErrorCode::ContainmentInfeasible,
                  "cycle levels cannot fill the tower base holes exactly");
    if (!holes.empty()) {
      PiecewiseAffineMap fill =
          order_preserving_scale_map(ctx.j_minus_istar, holes, ctx.slope_tower, budget);
      for (const auto& p : fill.pieces()) base_pieces.push_back(p);
    }
  }
  PiecewiseAffineMap tau_base = PiecewiseAffineMap::from_pieces(base_pieces, budget);
  for (const auto& p : tau_base.pieces()) pieces.push_back(p);

  // Levels 1 .. h-1 are transported copies of the base fill.
  PiecewiseAffineMap fwd, inv_r, inv_s;
  IntervalSet r_level = ctx.base;
  IntervalSet s_level = ctx.j_minus_istar;
  for (std::uint64_t i = 1; i < ctx.h; ++i) {
    fwd = (i == 1) ? ctx.r_map : compose(ctx.r_map, fwd, budget);
    inv_r = (i == 1) ? invert(ctx.r_map) : compose(inv_r, invert(ctx.r_map), budget);
    r_level = image(ctx.r_map, r_level);
    PiecewiseAffineMap level_tau = conjugate_level(fwd, tau_base, inv_r, r_level, budget);
    for (const auto& p : level_tau.pieces()) pieces.push_back(p);
    if (!s_level.empty()) {
      inv_s = (i == 1) ? invert(ctx.s_map) : compose(inv_s, invert(ctx.s_map), budget);
      s_level = image(ctx.s_map, s_level);
      PiecewiseAffineMap cycle_tau = conjugate_level(fwd, tau_base, inv_s, s_level, budget);
      for (const auto& p : cycle_tau.pieces()) pieces.push_back(p);
    }
  }

  // Residual-and-transfer part maps onto E order-preservingly.
  if (!ctx.x_prime.empty()) {
    PiecewiseAffineMap onto_e =
        order_preserving_scale_map(ctx.x_prime, ctx.residual, ctx.slope_residual, budget);
    for (const auto& p : onto_e.pieces()) pieces.push_back(p);
  }

  PiecewiseAffineMap tau = PiecewiseAffineMap::from_pieces(std::move(pieces), budget);
  if (!(tau.range() == ctx.x_cur))
    throw Error(ErrorCode::InternalInvariant, "tau range is not X_n");
  return tau;
}

Chain::Chain(RankOneSystem starter, TransferMode mode, ChainSchedule schedule, PieceBudget budget)
    : starter_(std::move(starter)),
      mode_(mode),
      schedule_(std::move(schedule)),
      budget_(budget),
      kappa_(0) {
  StageState first;
  first.n = 1;
  first.x = starter_.space;
  first.r = starter_.map;
  first.psi = PiecewiseAffineMap::identity(starter_.space);
  if (schedule_.stage1_tower_partition)
    first.approx = {IntervalSet(starter_.tower_base)};
  else
    first.approx = {starter_.space};
  first.b_prev = starter_.space.upper();
  stages_.push_back(std::move(first));
}

const StageState& Chain::stage(int n) const {
  if (n < 1 || n > built_stages())
    throw Error(ErrorCode::DepthInsufficient, "stage " + std::to_string(n) + " not built");
  return stages_[static_cast<std::size_t>(n - 1)];
}

StageState& Chain::stage_mutable(int n) {
  return stages_[static_cast<std::size_t>(n - 1)];
}

void Chain::activate(int n) {
  StageState& st = stage_mutable(n);
  if (st.activated) return;

  std::uint64_t h_prev = 1, m_prev = 1;
  Rat eps_prev(1);
  if (n > 1) {
    const StageState& prev = stage(n - 1);
    h_prev = prev.h;
    m_prev = prev.big_m;
    eps_prev = prev.eps;
  }
  std::size_t idx = static_cast<std::size_t>(n - 1);

  st.delta = idx < schedule_.delta.size()
                 ? schedule_.delta[idx]
                 : Rat(1) / Rat(static_cast<long>(UINT64_C(1) << std::min(n, 62)));
  st.j_count = std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(n), schedule_.vector_budget));

  std::uint64_t floor = std::max(h_prev, m_prev);
  if (idx < schedule_.m_over.size()) {
    st.big_m = schedule_.m_over[idx];
    if (st.big_m <= floor)
      throw Error(ErrorCode::ConfigInvalid,
                  "M override " + std::to_string(st.big_m) + " must exceed " +
                      std::to_string(floor),
                  n);
    st.search_value = Rat(0);
  } else {
    MSearchRequest req{st.r,
                       st.x.measure(),
                       st.approx,
                       st.delta,
                       enumerate_vectors(st.j_count, schedule_.vector_max_len,
                                         schedule_.vector_max_abs),
                       floor,
                       schedule_.search_cap,
                       schedule_.rho,
                       schedule_.check_rigidity,
                       budget_};
    MSearchResult res = choose_m(req);
    st.big_m = res.m;
    st.search_value = res.worst_sum;
  }

  if (idx < schedule_.eps_over.size() && idx < schedule_.h_over.size()) {
    st.eps = schedule_.eps_over[idx];
    st.h = schedule_.h_over[idx];
    if (st.eps.sign() <= 0 || st.h < 2)
      throw Error(ErrorCode::ConfigInvalid, "overridden eps/h out of range", n);
  } else if (idx < schedule_.eps_over.size() || idx < schedule_.h_over.size()) {
    throw Error(ErrorCode::ConfigInvalid, "eps and h overrides must be given together", n);
  } else {
    auto [eps, h] = choose_eps_h(st.big_m, n, eps_prev);
    st.eps = eps;
    st.h = h;
  }

  SCycle cycle = build_s_cycle(n, st.h, st.b_prev);
  st.s = std::move(cycle.S);
  st.y = cycle.Y;
  st.j_base = cycle.J;
  st.b = cycle.b;
  st.activated = true;
}

void Chain::multiplex_last() {
  int n = built_stages();
  StageState& st = stage_mutable(n);
  if (!st.activated) throw Error(ErrorCode::InternalInvariant, "multiplex before activation", n);
  if (st.multiplexed) throw Error(ErrorCode::InternalInvariant, "stage already multiplexed", n);

  Rat mu_x = st.x.measure();
  Rat mu_y = st.y->length();

  // Rokhlin tower for R_n, pulled from the starter through the conjugacy.
  auto [base1, res1] = rokhlin_tower(starter_, st.h, starter_.space.measure() + Rat(1));
  PiecewiseAffineMap psi_inv = invert(st.psi);
  st.tower_base = image(psi_inv, base1);
  st.residual = res1.empty() ? IntervalSet{} : image(psi_inv, res1);
  if (!(st.residual.measure() < st.eps))
    throw Error(ErrorCode::ResidualTooLarge,
                "residual " + st.residual.measure().str() + " not below eps " + st.eps.str() +
                    "; deepen the starter",
                n);

  st.d = solve_transfer(st.residual.measure(), mu_x, mu_y, mode_);
  st.istar = select_transfer_set(*st.j_base, st.d, st.h);
  IntervalSet j_minus_istar = set_difference(IntervalSet(*st.j_base), st.istar);

  st.x_prime = st.residual;
  {
    IntervalSet transfer_level = st.istar;
    for (std::uint64_t k = 0; k < st.h && !transfer_level.empty(); ++k) {
      if (k > 0) transfer_level = image(st.s, transfer_level);
      st.x_prime = set_union(st.x_prime, transfer_level);
    }
  }

  PartitionBuild parts =
      build_partitions(st.r, st.tower_base, st.h, st.approx, st.s, j_minus_istar, budget_);
  st.cells = std::move(parts.cells);
  st.p_prime = std::move(parts.p_prime);

  Rat slope_tower, slope_residual;
  if (mode_ == TransferMode::Uniform) {
    slope_tower = mu_x / (mu_x + mu_y);
    slope_residual = slope_tower;
  } else {
    Rat base_new = st.tower_base.measure() + j_minus_istar.measure();
    slope_tower = st.tower_base.measure() / base_new;
    slope_residual = st.x_prime.empty() ? slope_tower
                                        : st.residual.measure() / st.x_prime.measure();
  }

  TauContext ctx{st.x,   st.residual, st.tower_base, st.h,          st.r,
                 st.s,   j_minus_istar, st.x_prime,  st.cells,      slope_tower,
                 slope_residual};
  st.tau = build_tau(ctx, budget_);

  IntervalSet x_next = set_union(st.x, IntervalSet(*st.y));
  if (!(st.tau.domain() == x_next))
    throw Error(ErrorCode::InternalInvariant, "tau domain is not X_{n+1}", n);

  st.q.reserve(st.p_prime.size());
  for (const auto& p : st.p_prime) st.q.push_back(image(st.tau, p));

  PiecewiseAffineMap r_next = compose(invert(st.tau), compose(st.r, st.tau, budget_), budget_);
  PiecewiseAffineMap t_cur = disjoint_union(st.r, st.s, budget_);
  st.change_set = difference_support(r_next, t_cur);

  Rat denom = st.eps + Rat(1) / Rat(static_cast<long>(st.h));
  kappa_ = rat_max(kappa_, st.change_set.measure() / denom);

  StageState next;
  next.n = n + 1;
  next.x = std::move(x_next);
  next.r = std::move(r_next);
  next.psi = compose(st.psi, st.tau, budget_);
  next.approx = st.p_prime;
  next.b_prev = st.b;
  st.multiplexed = true;
  stages_.push_back(std::move(next));
}

void Chain::build_to(int count) {
  if (count < 1) throw Error(ErrorCode::ConfigInvalid, "stage count must be >= 1");
  while (built_stages() < count) {
    activate(built_stages());
    multiplex_last();
  }
  activate(count);
}

PiecewiseAffineMap Chain::assemble_t(int n) const {
  const StageState& st = stage(n);
  if (!st.activated)
    throw Error(ErrorCode::DepthInsufficient, "stage " + std::to_string(n) + " not activated");
  return disjoint_union(st.r, st.s, budget_);
}

void Chain::adopt_stages(std::vector<StageState> stages, Rat kappa) {
  if (stages.empty()) throw Error(ErrorCode::InternalInvariant, "cannot adopt an empty chain");
  stages_ = std::move(stages);
  kappa_ = std::move(kappa);
}

Rat stable_horizon(const Chain& chain, const IntervalSet& a, int n, std::uint64_t m) {
  int deepest = chain.built_stages();
  if (n + 1 > deepest)
    throw Error(ErrorCode::DepthInsufficient,
                "stable horizon needs stage " + std::to_string(n + 1) + " built");
  PiecewiseAffineMap t_next = chain.assemble_t(n + 1);
  if (!t_next.domain().contains_set(a))
    throw Error(ErrorCode::SetOutsideDomain, "A outside the domain of T_{n+1}");
  if (m == 0) return a.measure();

  PiecewiseAffineMap t_deep = chain.assemble_t(deepest);
  IntervalSet delta =
      difference_support(restrict(t_deep, t_next.domain(), chain.budget()), t_next);
  if (delta.empty()) return a.measure();

  PiecewiseAffineMap t_next_inv = invert(t_next);
  IntervalSet bad;  // union of T_{n+1}^{-j}(delta), j < m
  IntervalSet pre = delta;
  for (std::uint64_t jj = 0; jj < m; ++jj) {
    if (jj > 0) pre = image(t_next_inv, pre);
    bad = set_union(bad, pre);
  }
  return set_difference(a, bad).measure();
}

}  // namespace towerplex

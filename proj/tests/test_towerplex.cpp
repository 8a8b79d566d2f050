#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "towerplex/chain.hpp"
#include "towerplex/errors.hpp"
#include "towerplex/stats.hpp"

using namespace towerplex;

namespace {

Rat rq(const char* s) { return Rat::from_string(s); }

ChainSchedule fixed_schedule(std::vector<std::uint64_t> m, std::vector<Rat> eps,
                             std::vector<std::uint64_t> h) {
  ChainSchedule s;
  s.m_over = std::move(m);
  s.eps_over = std::move(eps);
  s.h_over = std::move(h);
  return s;
}

Chain odometer_chain(std::size_t depth, int stages, TransferMode mode = TransferMode::Uniform) {
  Chain chain(build_rank_one(RankOneSpec::odometer(depth), depth), mode,
              fixed_schedule({2, 5, 17}, {rq("1/8"), rq("1/32"), rq("1/128")}, {4, 8, 16}));
  chain.build_to(stages);
  return chain;
}

Chain chacon_chain(std::size_t depth, int stages, TransferMode mode) {
  Chain chain(build_rank_one(RankOneSpec::chacon(depth), depth), mode,
              fixed_schedule({2, 5, 17}, {rq("1/8"), rq("1/32"), rq("1/128")}, {4, 8, 16}));
  chain.build_to(stages);
  return chain;
}

}  // namespace

TEST_CASE("cycle construction") {
  SCycle c = build_s_cycle(1, 4, Rat(1));
  CHECK(c.Y == Interval(Rat(1), Rat(2)));
  CHECK(c.J == Interval(Rat(1), rq("5/4")));
  CHECK(c.b == Rat(2));
  CHECK(apply(c.S, Rat(1)) == rq("5/4"));
  CHECK(apply(c.S, rq("7/4")) == Rat(1));
  CHECK(iterate(c.S, 4) == PiecewiseAffineMap::identity(IntervalSet(c.Y)));

  SCycle c2 = build_s_cycle(2, 8, Rat(2));
  CHECK(c2.Y == Interval(Rat(2), rq("5/2")));
  CHECK(iterate(c2.S, 8) == PiecewiseAffineMap::identity(IntervalSet(c2.Y)));
}

TEST_CASE("transfer amount in both modes") {
  CHECK(solve_transfer(Rat(0), Rat(2), rq("1/2"), TransferMode::Uniform) == Rat(0));
  CHECK(solve_transfer(Rat(0), Rat(2), rq("1/2"), TransferMode::Literal) == Rat(0));

  Rat e = rq("1/100"), x = Rat(2), y = rq("1/2");
  Rat d_lit = solve_transfer(e, x, y, TransferMode::Literal);
  CHECK(d_lit == rq("1/402"));
  // Both sides of the defining balance equal E/X = 1/200.
  CHECK((e + d_lit) / (x + y - d_lit) == e / x);

  Rat d_uni = solve_transfer(e, x, y, TransferMode::Uniform);
  CHECK(d_uni == rq("1/400"));
  // Uniform contraction ratio: E/(E+d) = X/(X+Y) = 4/5.
  CHECK(e / (e + d_uni) == x / (x + y));
  CHECK(e / (e + d_uni) == rq("4/5"));
}

TEST_CASE("transfer set selection") {
  Interval j(Rat(1), rq("5/4"));
  CHECK(select_transfer_set(j, Rat(0), 4).empty());
  CHECK(select_transfer_set(j, rq("1/400"), 4) ==
        IntervalSet(Interval(Rat(1), rq("1601/1600"))));
  CHECK(select_transfer_set(j, Rat(1), 4) == IntervalSet(j));
  CHECK_THROWS_AS(select_transfer_set(j, Rat(2), 4), Error);
}

TEST_CASE("partition refinement on the tower base") {
  RankOneSystem sys = build_rank_one(RankOneSpec::odometer(3), 3);
  auto [base, residual] = rokhlin_tower(sys, 4, Rat(1));
  REQUIRE(residual.empty());
  SCycle cyc = build_s_cycle(1, 4, Rat(1));
  IntervalSet jset(cyc.J);

  SUBCASE("trivial previous partition gives one cell") {
    Partition trivial = {sys.space};
    PartitionBuild pb = build_partitions(sys.map, base, 4, trivial, cyc.S, jset);
    CHECK(pb.cells.size() == 1);
    CHECK(pb.cells[0] == base);
    CHECK(pb.p_prime.size() == 8);
    // Level-major: tower images first, then the cycle levels.
    CHECK(pb.p_prime[0] == base);
    CHECK(pb.p_prime[4] == jset);
  }

  SUBCASE("misaligned halves cut the base") {
    Partition halves = {IntervalSet(Interval(Rat(0), rq("3/8"))),
                       IntervalSet(Interval(rq("3/8"), Rat(1)))};
    PartitionBuild pb = build_partitions(sys.map, base, 4, halves, cyc.S, jset);
    REQUIRE(pb.cells.size() == 2);
    CHECK(pb.cells[0] == IntervalSet(Interval(Rat(0), rq("1/8"))));
    CHECK(pb.cells[1] == IntervalSet(Interval(rq("1/8"), rq("1/4"))));
    CHECK(pb.p_prime.size() == 2 * 4 + 4);
  }

  SUBCASE("empty cycle remainder leaves only tower pieces") {
    Partition trivial = {sys.space};
    PartitionBuild pb = build_partitions(sys.map, base, 4, trivial, cyc.S, IntervalSet{});
    CHECK(pb.p_prime.size() == 4);
  }
}

TEST_CASE("stage-1 multiplex of the odometer, hand-traced") {
  Chain chain = odometer_chain(6, 2);
  const StageState& st = chain.stage(1);
  REQUIRE(st.multiplexed);

  CHECK(st.residual.empty());
  CHECK(st.d == Rat(0));
  CHECK(st.istar.empty());
  CHECK(st.x_prime.empty());
  CHECK(st.tower_base == IntervalSet(Interval(Rat(0), rq("1/4"))));

  // tau_1 in full: slope 1/2 everywhere, each tower cell filled from the
  // left, the cycle levels filling what remains.
  PiecewiseAffineMap expected_tau = PiecewiseAffineMap::from_pieces({
      {Interval(Rat(0), rq("1/4")), rq("1/2"), Rat(0)},
      {Interval(rq("1/4"), rq("1/2")), rq("1/2"), rq("1/8")},
      {Interval(rq("1/2"), rq("3/4")), rq("1/2"), rq("1/4")},
      {Interval(rq("3/4"), Rat(1)), rq("1/2"), rq("3/8")},
      {Interval(Rat(1), rq("5/4")), rq("1/2"), rq("-3/8")},
      {Interval(rq("5/4"), rq("3/2")), rq("1/2"), Rat(0)},
      {Interval(rq("3/2"), rq("7/4")), rq("1/2"), rq("-3/8")},
      {Interval(rq("7/4"), Rat(2)), rq("1/2"), Rat(0)},
  });
  CHECK(st.tau == expected_tau);

  const StageState& st2 = chain.stage(2);
  CHECK(st2.x == IntervalSet(Interval(Rat(0), Rat(2))));
  CHECK(st2.x.measure() == Rat(2));
  CHECK(st2.r.is_measure_preserving());
  CHECK(apply(st2.r, Rat(0)) == rq("1/2"));
  CHECK(apply(st2.r, rq("1/2")) == rq("1/4"));
  CHECK(apply(st2.r, rq("7/8")) == rq("9/8"));  // top tower level enters the cycle base
  CHECK(apply(st2.r, rq("9/8")) == rq("11/8"));

  // Change set: exactly the top level of the combined tower.
  CHECK(st.change_set ==
        IntervalSet::from_intervals({Interval(rq("3/4"), Rat(1)), Interval(rq("7/4"), Rat(2))}));
  CHECK(st.change_set.measure() == rq("1/2"));
  CHECK(chain.kappa() == rq("4/3"));  // (1/2) / (1/8 + 1/4)

  CHECK(st.p_prime.size() == 8);
  for (const auto& p : st.p_prime) CHECK(p.measure() == rq("1/4"));
}

TEST_CASE("case split: the new map extends the old ones below the top level") {
  Chain chain = odometer_chain(6, 2);
  const StageState& st = chain.stage(1);
  const StageState& st2 = chain.stage(2);

  IntervalSet jmi = set_difference(IntervalSet(*st.j_base), st.istar);
  IntervalSet r_level = st.tower_base;
  IntervalSet s_level = jmi;
  for (std::uint64_t i = 0; i + 1 < st.h; ++i) {
    if (i > 0) {
      r_level = image(st.r, r_level);
      s_level = image(st.s, s_level);
    }
    CHECK(equal_on(st2.r, st.r, r_level));
    CHECK(equal_on(st2.r, st.s, s_level));
  }
  // And on the top level the maps genuinely part ways.
  IntervalSet top_r = image(iterate(st.r, static_cast<std::int64_t>(st.h - 1)), st.tower_base);
  CHECK(set_intersect(st.change_set, top_r) == top_r);
}

TEST_CASE("scaling identity and containment for every partition element") {
  for (int variant = 0; variant < 2; ++variant) {
    Chain chain = variant == 0 ? odometer_chain(6, 3)
                               : chacon_chain(4, 3, TransferMode::Uniform);
    for (int n = 1; n < chain.built_stages(); ++n) {
      const StageState& st = chain.stage(n);
      REQUIRE(st.multiplexed);
      Rat ratio = chain.stage(n + 1).x.measure() / st.x.measure();
      REQUIRE(st.p_prime.size() == st.q.size());
      for (std::size_t i = 0; i < st.p_prime.size(); ++i) {
        CHECK(st.p_prime[i].measure() / st.q[i].measure() == ratio);
        CHECK(st.q[i] == image(st.tau, st.p_prime[i]));
      }
      // Containment tau(p) ⊆ p on the tower-descended cells (the first
      // h * |C| entries; cycle levels map into the tower instead).
      std::size_t tower_cells = st.h * st.cells.size();
      for (std::size_t i = 0; i < tower_cells; ++i)
        CHECK(st.p_prime[i].contains_set(st.q[i]));
    }
  }
}

TEST_CASE("uniform mode keeps every map measure preserving") {
  Chain chain = chacon_chain(4, 3, TransferMode::Uniform);
  for (int n = 1; n <= 3; ++n) {
    CHECK(chain.stage(n).r.is_measure_preserving());
    CHECK(chain.stage(n).s.is_measure_preserving());
    CHECK(chain.assemble_t(n).is_measure_preserving());
  }
  // Nontrivial residual and transfer at stage 1: 121 = 4 * 30 + 1.
  const StageState& st = chain.stage(1);
  CHECK(st.residual.measure() == rq("2/243"));
  CHECK(st.d == st.residual.measure() * Rat(1) / st.x.measure());
  CHECK(st.d == rq("1/121"));
  CHECK(st.x_prime.measure() == st.residual.measure() + st.d);
}

TEST_CASE("literal mode reproduces the unscaled balance and its defect") {
  Chain chain = chacon_chain(4, 2, TransferMode::Literal);
  const StageState& st = chain.stage(1);
  Rat x = st.x.measure(), y = st.y->length(), e = st.residual.measure(), d = st.d;
  REQUIRE(e.sign() > 0);

  // The displayed balance holds exactly for the literal d.
  CHECK(d == e * y / (x + e));
  CHECK((e + d) / (x + y - d) == e / x);

  // The tower-side ratio misses mu(X_2)/mu(X_1) by the predicted factor.
  Rat ratio_tower = (x * x - e * e + x * y) / (x * x - e * e);
  Rat ratio_uniform = (x + y) / x;
  CHECK(ratio_tower != ratio_uniform);
  for (std::size_t i = 0; i < st.p_prime.size(); ++i)
    CHECK(st.p_prime[i].measure() / st.q[i].measure() == ratio_tower);

  // Residual side contracts by E/(E+d) = (X+E)/(X+E+Y), not X/(X+Y).
  CHECK(e / (e + d) == (x + e) / (x + e + y));
  CHECK(e / (e + d) != x / (x + y));
  CHECK(image(st.tau, st.x_prime) == st.residual);

  // The conjugated map is no longer measure preserving.
  CHECK_FALSE(chain.stage(2).r.is_measure_preserving());
}

TEST_CASE("assembled transformations grow by the harmonic tail") {
  Chain chain = odometer_chain(6, 3);
  PiecewiseAffineMap t1 = chain.assemble_t(1);
  CHECK(t1.domain() == IntervalSet(Interval(Rat(0), Rat(2))));
  CHECK(t1.domain().measure() == Rat(2));
  CHECK(chain.assemble_t(2).domain().measure() == rq("5/2"));
  CHECK(chain.assemble_t(3).domain().measure() == rq("17/6"));
  CHECK(chain.stage(1).b == Rat(2));
  CHECK(chain.stage(2).b == rq("5/2"));
  CHECK(chain.stage(3).b == rq("17/6"));

  // T_{n+1} agrees with T_n exactly off the change set.
  PiecewiseAffineMap t2 = chain.assemble_t(2);
  IntervalSet dom1 = t1.domain();
  CHECK(difference_support(restrict(t2, dom1), t1) == chain.stage(1).change_set);
}

TEST_CASE("conjugacy transport identity (uniform scaling)") {
  Chain chain = chacon_chain(4, 2, TransferMode::Uniform);
  const StageState& st = chain.stage(1);
  const StageState& st2 = chain.stage(2);
  Rat ratio = st2.x.measure() / st.x.measure();

  // mu(A ∩ R_2^i B) = ratio * mu(tau A ∩ R_1^i tau B) for partition sets.
  std::vector<std::size_t> picks = {0, 3, 5, 7};
  PiecewiseAffineMap r2_step = st2.r;
  for (std::size_t ai : picks) {
    const IntervalSet& a = st.q[ai];
    IntervalSet tau_a = image(st.tau, a);
    for (std::size_t bi : picks) {
      const IntervalSet& b = st.q[bi];
      IntervalSet tau_b = image(st.tau, b);
      IntervalSet b_moved = b;
      IntervalSet tau_b_moved = tau_b;
      for (int i = 0; i <= 8; ++i) {
        if (i > 0) {
          b_moved = image(st2.r, b_moved);
          tau_b_moved = image(st.r, tau_b_moved);
        }
        CHECK(set_intersect(a, b_moved).measure() ==
              ratio * set_intersect(tau_a, tau_b_moved).measure());
      }
    }
  }
}

TEST_CASE("rescaling inequalities at a desk-scale stage") {
  Chain chain = chacon_chain(4, 2, TransferMode::Uniform);
  const StageState& st = chain.stage(1);
  const StageState& st2 = chain.stage(2);
  Rat mu_x = st.x.measure();
  Rat ratio = st2.x.measure() / mu_x;

  // delta pinned just above 6 (eps + mu(Y)).
  Rat delta = rq("49/8") * (st.eps + st.y->length());
  REQUIRE(st.eps + st.y->length() < delta / Rat(6));

  IntervalSet f = st.x;  // F = X_1
  WeightSequence w1 = weight_sequence(st.r, f, 12);
  WeightSequence w2 = weight_sequence(st2.r, f, 12);

  for (std::size_t ai : {std::size_t(0), std::size_t(5)}) {
    const IntervalSet& a = st.q[ai];
    Rat mu_a = a.measure();
    // Exact transported symmetric difference: the uniform contraction turns
    // inequality (2)'s proof step into an identity.
    IntervalSet a2 = a;
    IntervalSet tau_a = image(st.tau, a);
    IntervalSet tau_moved = tau_a;
    for (int i = 1; i <= 8; ++i) {
      a2 = image(st2.r, a2);
      tau_moved = image(st.r, tau_moved);
      Rat dev2 = set_symmetric_difference(a2, a).measure();
      Rat dev1_tau = set_symmetric_difference(tau_moved, tau_a).measure();
      CHECK(dev2 == ratio * dev1_tau);
      // Paper inequality (2).
      Rat dev1 = rigidity_deviation(st.r, a, static_cast<std::uint64_t>(i));
      CHECK(dev2 < dev1 + delta / (Rat(2) * mu_x));
      // Paper inequality (1) with B = A.
      Rat lhs = (set_intersect(a, a2).measure() - mu_a * mu_a * w2.u[static_cast<std::size_t>(i)])
                    .abs();
      Rat rhs = (set_intersect(a, image(iterate(st.r, i), a)).measure() -
                 mu_a * mu_a * w1.u[static_cast<std::size_t>(i)])
                    .abs();
      CHECK(lhs < rhs + delta / mu_x);
    }
  }
}

TEST_CASE("stable horizon accounting") {
  Chain chain = odometer_chain(6, 3);
  IntervalSet a(Interval(Rat(0), Rat(1)));

  CHECK(stable_horizon(chain, a, 2, 0) == a.measure());
  CHECK(stable_horizon(chain, a, 2, 5) == a.measure());  // built exactly to n+1

  Rat stable = stable_horizon(chain, a, 1, 3);
  Rat defect = a.measure() - stable;
  // Union bound from the recorded change sets beyond stage 2.
  Rat change_total = chain.stage(2).change_set.measure();
  CHECK(defect <= Rat(3) * change_total);
  CHECK(stable.sign() > 0);

  CHECK_THROWS_AS(stable_horizon(chain, a, 3, 1), Error);
}

TEST_CASE("deeper stages need deep enough starters") {
  // Height-8 tower from a depth-2 odometer (height 4) is impossible.
  Chain chain(build_rank_one(RankOneSpec::odometer(2), 2), TransferMode::Uniform,
              fixed_schedule({2, 5}, {rq("1/8"), rq("1/32")}, {4, 8}));
  CHECK_THROWS_AS(chain.build_to(3), Error);
}

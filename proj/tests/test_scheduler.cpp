#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "towerplex/chain.hpp"
#include "towerplex/errors.hpp"
#include "towerplex/scheduler.hpp"

using namespace towerplex;

namespace {
Rat rq(const char* s) { return Rat::from_string(s); }
}

TEST_CASE("vector enumeration order") {
  auto two = enumerate_vectors(2, 3, 3);
  CHECK(two == std::vector<std::vector<int>>{{-1}, {1}});

  auto many = enumerate_vectors(12, 3, 3);
  CHECK(many[0] == std::vector<int>{-1});
  CHECK(many[1] == std::vector<int>{1});
  CHECK(many[2] == std::vector<int>{-2});
  CHECK(many[3] == std::vector<int>{2});
  CHECK(many[4] == std::vector<int>{-3});
  CHECK(many[5] == std::vector<int>{3});
  // Length 2 starts after the scalars; max-entry 1 group first.
  CHECK(many[6] == std::vector<int>{-1, -1});
  CHECK(many[7] == std::vector<int>{-1, 1});
  CHECK(many[8] == std::vector<int>{1, -1});
  CHECK(many[9] == std::vector<int>{1, 1});
  // <1,1> appears before any vector containing a 2.
  auto upto = enumerate_vectors(20, 2, 2);
  auto pos = [&](const std::vector<int>& v) {
    for (std::size_t i = 0; i < upto.size(); ++i)
      if (upto[i] == v) return i;
    return upto.size();
  };
  CHECK(pos({1, 1}) < pos({1, 2}));
  REQUIRE(pos({1, 2}) < upto.size());

  // Prefix stability.
  auto shorter = enumerate_vectors(6, 3, 3);
  for (std::size_t i = 0; i < shorter.size(); ++i) CHECK(shorter[i] == many[i]);

  CHECK_THROWS_AS(enumerate_vectors(3, 1, 1), Error);
}

TEST_CASE("eps and h brackets") {
  auto [eps3, h3] = choose_eps_h(50, 3, rq("1/100"));
  CHECK(eps3 == rq("1/16384"));
  CHECK(h3 == 16384);

  auto [eps1, h1] = choose_eps_h(1, 1, Rat(1));
  CHECK(eps1 == rq("1/2"));
  CHECK(h1 == 2);

  // The pair always satisfies the structural inequalities.
  ScheduleParams params;
  params.delta = {rq("1/2"), rq("1/4")};
  params.m = {2, 50};
  params.eps0 = Rat(1);
  auto [e1, hh1] = choose_eps_h(2, 1, Rat(1));
  auto [e2, hh2] = choose_eps_h(50, 2, e1);
  params.eps = {e1, e2};
  params.h = {hh1, hh2};
  params.validate();
  CHECK(e1 == rq("1/4"));
  CHECK(hh1 == 4);

  ScheduleParams broken = params;
  broken.m = {2, 3};  // M_2 must exceed h_1 = 4
  CHECK_THROWS_AS(broken.validate(), Error);
}

TEST_CASE("search with a vacuous condition returns the first admissible M") {
  RankOneSystem sys = build_rank_one(RankOneSpec::odometer(6), 6);
  Partition cells = {sys.space};  // the full space: all terms vanish
  MSearchRequest req{sys.map, sys.space.measure(), cells, rq("1/2"),
                     enumerate_vectors(1, 3, 3), 1,    64,       std::nullopt,
                     false,   PieceBudget{}};
  MSearchResult res = choose_m(req);
  CHECK(res.m == 2);
  CHECK(res.worst_sum == Rat(0));

  Partition empty_cells = {IntervalSet{}};
  MSearchRequest req2{sys.map, sys.space.measure(), empty_cells, rq("1/1000"),
                      enumerate_vectors(1, 3, 3), 5,    64,          std::nullopt,
                      false,   PieceBudget{}};
  CHECK(choose_m(req2).m == 6);
}

TEST_CASE("search on the chacon base cell: frozen regression") {
  RankOneSystem sys = build_rank_one(RankOneSpec::chacon(5), 5);
  Partition cells = {IntervalSet(sys.tower_base)};
  MSearchRequest req{sys.map, sys.space.measure(), cells, rq("1/2"),
                     enumerate_vectors(1, 3, 3), 1,    256,      std::nullopt,
                     false,   PieceBudget{}};
  MSearchResult res = choose_m(req);
  CHECK(res.m == 2);
  CHECK(res.worst_sum < rq("1/2"));

  // A tighter target forces a longer averaging window; the chosen M and the
  // sum achieved there are regression values frozen from this search.
  MSearchRequest tight{sys.map, sys.space.measure(), cells, rq("1/3000"),
                       enumerate_vectors(1, 3, 3), 1,    256,      std::nullopt,
                       false,   PieceBudget{}};
  MSearchResult tight_res = choose_m(tight);
  CHECK(tight_res.m == 9);
  CHECK(tight_res.worst_sum == rq("1080352/3486784401"));
}

TEST_CASE("search respects the floor and the cap") {
  RankOneSystem sys = build_rank_one(RankOneSpec::chacon(4), 4);
  Partition cells = {IntervalSet(sys.tower_base)};
  MSearchRequest req{sys.map, sys.space.measure(), cells, rq("1/2"),
                     enumerate_vectors(1, 3, 3), 9,    256,      std::nullopt,
                     false,   PieceBudget{}};
  CHECK(choose_m(req).m > 9);

  // Periodic recurrence keeps the sum bounded away from zero: a cyclic
  // 4-interval rotation has full returns every 4 steps.
  SCycle c = build_s_cycle(1, 4, Rat(0));
  Partition cell = {IntervalSet(c.J)};
  MSearchRequest hopeless{c.S,   Rat(1), cell, rq("1/100"), enumerate_vectors(1, 3, 3),
                          1,     64,     std::nullopt, false, PieceBudget{}};
  CHECK_THROWS_AS(choose_m(hopeless), Error);
  try {
    choose_m(hopeless);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SearchCapExceeded);
    CHECK(e.detail().find("best sum achieved") != std::string::npos);
  }

  MSearchRequest empty_window{c.S, Rat(1), cell, rq("1/2"), enumerate_vectors(1, 3, 3),
                              64,  64,     std::nullopt, false, PieceBudget{}};
  CHECK_THROWS_AS(choose_m(empty_window), Error);
}

TEST_CASE("search is monotone in delta") {
  RankOneSystem sys = build_rank_one(RankOneSpec::chacon(5), 5);
  Partition cells = {IntervalSet(sys.tower_base)};
  std::uint64_t prev = 0;
  for (const char* delta : {"1/2", "1/1000", "1/3000", "1/10000"}) {
    MSearchRequest req{sys.map, sys.space.measure(), cells, rq(delta),
                       enumerate_vectors(1, 3, 3), 1,    512,      std::nullopt,
                       false,   PieceBudget{}};
    std::uint64_t m = choose_m(req).m;
    CHECK(m >= prev);
    prev = m;
  }
}

TEST_CASE("rigidity predicate joins the search") {
  RankOneSystem sys = build_rank_one(RankOneSpec::odometer(8), 8);
  // Dyadic cylinder cells return exactly at dyadic times, so the rigidity
  // side never blocks; the correlation side is vacuous on the full space.
  Partition cells = {sys.space};
  RigiditySequence rho{{2, 4, 8}};
  MSearchRequest req{sys.map, sys.space.measure(), cells, rq("1/4"),
                     enumerate_vectors(1, 3, 3), 3,    64,       rho,
                     true,    PieceBudget{}};
  CHECK(choose_m(req).m == 4);

  // A forever-moving cell blocks the predicate: rotation by 1/4 on a cell
  // of length 1/4 never returns at times 2, 6.
  SCycle c = build_s_cycle(1, 4, Rat(0));
  Partition cell = {IntervalSet(c.J)};
  RigiditySequence off_cycle{{2, 6}};
  MSearchRequest blocked{c.S, Rat(1), cell, Rat(1, 8), enumerate_vectors(1, 3, 3),
                         1,   16,     off_cycle, true, PieceBudget{}};
  CHECK_THROWS_AS(choose_m(blocked), Error);
}

TEST_CASE("automatic stage-1 schedule lands on height four") {
  // Defaults eps_0 = 1, M_0 = h_0 = 1, delta_1 = 1/2 and a trivial
  // partition give M_1 = 2 and thus eps_1 = 1/4, h_1 = 4.
  Chain chain(build_rank_one(RankOneSpec::odometer(6), 6), TransferMode::Uniform,
              ChainSchedule{});
  chain.activate(1);
  const StageState& st = chain.stage(1);
  CHECK(st.big_m == 2);
  CHECK(st.eps == rq("1/4"));
  CHECK(st.h == 4);
  CHECK(st.y == Interval(Rat(1), Rat(2)));
}

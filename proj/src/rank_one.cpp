#include "towerplex/rank_one.hpp"

#include <algorithm>

#include "towerplex/errors.hpp"

namespace towerplex {

RankOneSpec RankOneSpec::odometer(std::size_t stages) {
  RankOneSpec spec;
  spec.cuts.assign(stages, 2);
  spec.spacers.assign(stages, {0, 0});
  spec.initial_base = Interval(Rat(0), Rat(1));
  return spec;
}

RankOneSpec RankOneSpec::chacon(std::size_t stages) {
  RankOneSpec spec;
  spec.cuts.assign(stages, 3);
  spec.spacers.assign(stages, {0, 1, 0});
  spec.initial_base = Interval(Rat(0), Rat(2, 3));
  return spec;
}

void RankOneSpec::validate() const {
  if (cuts.size() != spacers.size())
    throw Error(ErrorCode::ConfigInvalid, "cuts and spacers must have equal length");
  for (std::size_t m = 0; m < cuts.size(); ++m) {
    if (cuts[m] < 2) throw Error(ErrorCode::ConfigInvalid, "cut counts must be >= 2");
    if (spacers[m].size() != cuts[m])
      throw Error(ErrorCode::ConfigInvalid, "stage needs one spacer count per subcolumn");
  }
}

RankOneSystem build_rank_one(const RankOneSpec& spec, std::size_t m, const PieceBudget& budget) {
  spec.validate();
  if (m > spec.cuts.size())
    throw Error(ErrorCode::SpecExhausted,
                "stage " + std::to_string(m) + " beyond spec length " +
                    std::to_string(spec.cuts.size()));

  std::vector<Interval> levels = {spec.initial_base};
  Rat width = spec.initial_base.length();
  Rat space_end = spec.initial_base.hi;

  for (std::size_t st = 0; st < m; ++st) {
    std::uint32_t r = spec.cuts[st];
    Rat sub_width = width / Rat(static_cast<long>(r));
    std::vector<Interval> next;
    next.reserve(levels.size() * r + 8);
    for (std::uint32_t j = 0; j < r; ++j) {
      Rat off = sub_width * Rat(static_cast<long>(j));
      for (const auto& lvl : levels) next.emplace_back(lvl.lo + off, lvl.lo + off + sub_width);
      for (std::uint32_t s = 0; s < spec.spacers[st][j]; ++s) {
        next.emplace_back(space_end, space_end + sub_width);
        space_end += sub_width;
      }
    }
    budget.check(next.size());
    levels = std::move(next);
    width = sub_width;
  }

  RankOneSystem sys;
  sys.spec = spec;
  sys.stage = m;
  sys.levels = levels;
  sys.tower_base = levels.front();
  sys.tower_height = levels.size();
  sys.space = IntervalSet(Interval(spec.initial_base.lo, space_end));

  std::vector<AffinePiece> pieces;
  pieces.reserve(levels.size());
  for (std::size_t k = 0; k + 1 < levels.size(); ++k)
    pieces.push_back({levels[k], Rat(1), levels[k + 1].lo - levels[k].lo});
  // Wraparound closes the column into a bijection of the space.
  pieces.push_back({levels.back(), Rat(1), levels.front().lo - levels.back().lo});
  sys.map = PiecewiseAffineMap::from_pieces(std::move(pieces), budget);
  return sys;
}

std::pair<IntervalSet, IntervalSet> rokhlin_tower(const RankOneSystem& sys, std::uint64_t h,
                                                  const Rat& eps) {
  if (h == 0) throw Error(ErrorCode::ConfigInvalid, "tower height must be positive");
  if (h > sys.tower_height)
    throw Error(ErrorCode::ResidualTooLarge,
                "requested height " + std::to_string(h) + " exceeds native height " +
                    std::to_string(sys.tower_height) + "; build a deeper stage");
  std::uint64_t groups = sys.tower_height / h;
  std::vector<Interval> base, residual;
  for (std::uint64_t j = 0; j < groups; ++j) base.push_back(sys.levels[j * h]);
  for (std::uint64_t k = groups * h; k < sys.tower_height; ++k)
    residual.push_back(sys.levels[k]);
  IntervalSet base_set = IntervalSet::from_intervals(std::move(base));
  IntervalSet residual_set = IntervalSet::from_intervals(std::move(residual));
  if (!(residual_set.measure() < eps))
    throw Error(ErrorCode::ResidualTooLarge,
                "residual measure " + residual_set.measure().str() + " not below " + eps.str() +
                    "; build a deeper stage");
  return {std::move(base_set), std::move(residual_set)};
}

void RigiditySequence::validate() const {
  if (terms.empty()) throw Error(ErrorCode::ConfigInvalid, "rigidity sequence is empty");
  for (std::size_t i = 0; i + 1 < terms.size(); ++i)
    if (terms[i] >= terms[i + 1])
      throw Error(ErrorCode::ConfigInvalid, "rigidity sequence must be strictly increasing");
}

RigiditySequence convergent_denominators(const std::vector<std::uint64_t>& cf, std::size_t count) {
  if (cf.empty()) throw Error(ErrorCode::ConfigInvalid, "continued fraction is empty");
  if (count == 0 || count > cf.size())
    throw Error(ErrorCode::ConfigInvalid, "convergent count outside [1, len(cf)]");
  RigiditySequence seq;
  std::uint64_t q_prev2 = 0, q_prev1 = 1;
  for (std::size_t k = 0; k < count; ++k) {
    std::uint64_t q = cf[k] * q_prev1 + q_prev2;
    seq.terms.push_back(q);
    q_prev2 = q_prev1;
    q_prev1 = q;
  }
  seq.validate();
  return seq;
}

Rat density(const RigiditySequence& a, std::uint64_t k) {
  if (k == 0) throw Error(ErrorCode::ConfigInvalid, "density horizon must be >= 1");
  auto upper = std::upper_bound(a.terms.begin(), a.terms.end(), k);
  long count = static_cast<long>(upper - a.terms.begin());
  return Rat(count) / Rat(static_cast<long>(k));
}

}  // namespace towerplex

#include "towerplex/piecewise_map.hpp"

#include <algorithm>
#include <ostream>

#include "towerplex/errors.hpp"

namespace towerplex {

void PieceBudget::check(std::size_t count) const {
  if (count > max_pieces)
    throw Error(ErrorCode::PieceBudgetExceeded,
                std::to_string(count) + " pieces exceed budget " + std::to_string(max_pieces));
}

PiecewiseAffineMap PiecewiseAffineMap::from_pieces(std::vector<AffinePiece> pieces,
                                                   const PieceBudget& budget) {
  budget.check(pieces.size());
  std::sort(pieces.begin(), pieces.end(), [](const AffinePiece& a, const AffinePiece& b) {
    return a.source.lo < b.source.lo;
  });

  // Merge adjacent pieces sharing the same affine law; reject overlaps.
  std::vector<AffinePiece> merged;
  merged.reserve(pieces.size());
  for (auto& p : pieces) {
    if (p.slope.sign() <= 0)
      throw Error(ErrorCode::InternalInvariant, "piece slope must be positive");
    if (!merged.empty()) {
      AffinePiece& prev = merged.back();
      if (p.source.lo < prev.source.hi)
        throw Error(ErrorCode::InternalInvariant, "overlapping piece sources");
      if (p.source.lo == prev.source.hi && p.slope == prev.slope && p.offset == prev.offset) {
        prev.source.hi = p.source.hi;
        continue;
      }
    }
    merged.push_back(std::move(p));
  }

  // Images must be pairwise disjoint for the map to be a bijection.
  std::vector<Interval> images;
  images.reserve(merged.size());
  for (const auto& p : merged) images.push_back(p.image());
  std::sort(images.begin(), images.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < images.size(); ++i)
    if (images[i + 1].lo < images[i].hi)
      throw Error(ErrorCode::InternalInvariant, "piece images overlap; map not injective");

  PiecewiseAffineMap out;
  {
    std::vector<Interval> dom;
    dom.reserve(merged.size());
    for (const auto& p : merged) dom.push_back(p.source);
    out.domain_ = IntervalSet::from_intervals(std::move(dom));
    out.range_ = IntervalSet::from_intervals(std::move(images));
  }
  out.pieces_ = std::move(merged);
  return out;
}

PiecewiseAffineMap PiecewiseAffineMap::identity(const IntervalSet& domain) {
  std::vector<AffinePiece> pieces;
  pieces.reserve(domain.size());
  for (const auto& iv : domain.intervals()) pieces.push_back({iv, Rat(1), Rat(0)});
  return from_pieces(std::move(pieces));
}

bool PiecewiseAffineMap::is_measure_preserving() const {
  for (const auto& p : pieces_)
    if (!(p.slope == Rat(1))) return false;
  return true;
}

namespace {

// Index of the piece whose source contains x, or npos.
std::size_t piece_index_at(const std::vector<AffinePiece>& pieces, const Rat& x) {
  auto it = std::upper_bound(pieces.begin(), pieces.end(), x,
                             [](const Rat& v, const AffinePiece& p) { return v < p.source.lo; });
  if (it == pieces.begin()) return static_cast<std::size_t>(-1);
  --it;
  if (!it->source.contains(x)) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - pieces.begin());
}

}  // namespace

Rat apply(const PiecewiseAffineMap& f, const Rat& x) {
  std::size_t i = piece_index_at(f.pieces(), x);
  if (i == static_cast<std::size_t>(-1))
    throw Error(ErrorCode::PointOutsideDomain, "point " + x.str() + " outside map domain");
  return f.pieces()[i].apply(x);
}

Rat apply_inverse(const PiecewiseAffineMap& f, const Rat& y) {
  for (const auto& p : f.pieces()) {
    Interval img = p.image();
    if (img.contains(y)) return (y - p.offset) / p.slope;
  }
  throw Error(ErrorCode::PointOutsideDomain, "point " + y.str() + " outside map range");
}

PiecewiseAffineMap invert(const PiecewiseAffineMap& f) {
  std::vector<AffinePiece> pieces;
  pieces.reserve(f.piece_count());
  for (const auto& p : f.pieces()) {
    Rat inv_slope = Rat(1) / p.slope;
    pieces.push_back({p.image(), inv_slope, -p.offset * inv_slope});
  }
  return PiecewiseAffineMap::from_pieces(std::move(pieces));
}

PiecewiseAffineMap compose(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g,
                           const PieceBudget& budget) {
  // Pieces of f∘g: common refinement of g's pieces with g-preimages of f's
  // pieces. Every g-image point must be covered by some f piece.
  std::vector<AffinePiece> pieces;
  for (const auto& gp : g.pieces()) {
    Interval gimg = gp.image();
    Rat covered(0);
    for (const auto& fp : f.pieces()) {
      Rat lo = rat_max(gimg.lo, fp.source.lo);
      Rat hi = rat_min(gimg.hi, fp.source.hi);
      if (!(lo < hi)) continue;
      covered += hi - lo;
      Rat src_lo = (lo - gp.offset) / gp.slope;
      Rat src_hi = (hi - gp.offset) / gp.slope;
      pieces.push_back({Interval(src_lo, src_hi), fp.slope * gp.slope,
                        fp.slope * gp.offset + fp.offset});
      budget.check(pieces.size());
    }
    if (!(covered == gimg.length()))
      throw Error(ErrorCode::DomainMismatch, "composition: inner map's range not covered");
  }
  return PiecewiseAffineMap::from_pieces(std::move(pieces), budget);
}

PiecewiseAffineMap iterate(const PiecewiseAffineMap& f, std::int64_t k, const PieceBudget& budget) {
  if (!(f.domain() == f.range()))
    throw Error(ErrorCode::DomainMismatch, "iterate requires domain == range");
  if (k == 0) return PiecewiseAffineMap::identity(f.domain());
  PiecewiseAffineMap step = k > 0 ? f : invert(f);
  std::int64_t n = k > 0 ? k : -k;
  PiecewiseAffineMap acc = step;
  for (std::int64_t i = 1; i < n; ++i) acc = compose(step, acc, budget);
  return acc;
}

IntervalSet image(const PiecewiseAffineMap& f, const IntervalSet& s) {
  std::vector<Interval> out;
  const auto& pieces = f.pieces();
  for (const auto& iv : s.intervals()) {
    Rat covered(0);
    // First piece whose source can intersect iv.
    auto it = std::upper_bound(pieces.begin(), pieces.end(), iv.lo,
                               [](const Rat& v, const AffinePiece& p) { return v < p.source.lo; });
    if (it != pieces.begin()) --it;
    for (; it != pieces.end() && it->source.lo < iv.hi; ++it) {
      Rat lo = rat_max(iv.lo, it->source.lo);
      Rat hi = rat_min(iv.hi, it->source.hi);
      if (!(lo < hi)) continue;
      covered += hi - lo;
      out.emplace_back(it->apply(lo), it->apply(hi));
    }
    if (!(covered == iv.length()))
      throw Error(ErrorCode::SetOutsideDomain, "set extends outside map domain");
  }
  return IntervalSet::from_intervals(std::move(out));
}

IntervalSet preimage(const PiecewiseAffineMap& f, const IntervalSet& s) {
  std::vector<Interval> out;
  Rat want = s.measure(), got(0);
  for (const auto& p : f.pieces()) {
    Interval img = p.image();
    for (const auto& iv : s.intervals()) {
      Rat lo = rat_max(iv.lo, img.lo);
      Rat hi = rat_min(iv.hi, img.hi);
      if (!(lo < hi)) continue;
      got += hi - lo;  // coverage accounting in range coordinates
      out.emplace_back((lo - p.offset) / p.slope, (hi - p.offset) / p.slope);
    }
  }
  IntervalSet result = IntervalSet::from_intervals(std::move(out));
  if (!(got == want))
    throw Error(ErrorCode::SetOutsideDomain, "set extends outside map range");
  return result;
}

PiecewiseAffineMap restrict(const PiecewiseAffineMap& f, const IntervalSet& s,
                            const PieceBudget& budget) {
  std::vector<AffinePiece> pieces;
  Rat covered(0);
  for (const auto& p : f.pieces()) {
    for (const auto& iv : s.intervals()) {
      Rat lo = rat_max(iv.lo, p.source.lo);
      Rat hi = rat_min(iv.hi, p.source.hi);
      if (!(lo < hi)) continue;
      covered += hi - lo;
      pieces.push_back({Interval(lo, hi), p.slope, p.offset});
    }
  }
  if (!(covered == s.measure()))
    throw Error(ErrorCode::SetOutsideDomain, "restriction set extends outside map domain");
  return PiecewiseAffineMap::from_pieces(std::move(pieces), budget);
}

PiecewiseAffineMap disjoint_union(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g,
                                  const PieceBudget& budget) {
  std::vector<AffinePiece> pieces = f.pieces();
  pieces.insert(pieces.end(), g.pieces().begin(), g.pieces().end());
  return PiecewiseAffineMap::from_pieces(std::move(pieces), budget);
}

IntervalSet difference_support(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g) {
  if (!(f.domain() == g.domain()))
    throw Error(ErrorCode::DomainMismatch, "difference_support requires equal domains");
  std::vector<Interval> out;
  for (const auto& fp : f.pieces()) {
    for (const auto& gp : g.pieces()) {
      Rat lo = rat_max(fp.source.lo, gp.source.lo);
      Rat hi = rat_min(fp.source.hi, gp.source.hi);
      if (!(lo < hi)) continue;
      if (fp.slope == gp.slope && fp.offset == gp.offset) continue;
      out.emplace_back(lo, hi);
    }
  }
  return IntervalSet::from_intervals(std::move(out));
}

bool equal_on(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g, const IntervalSet& s) {
  return restrict(f, s) == restrict(g, s);
}

PiecewiseAffineMap order_preserving_scale_map(const IntervalSet& src, const IntervalSet& dst,
                                              const Rat& slope, const PieceBudget& budget) {
  if (!(dst.measure() == slope * src.measure()))
    throw Error(ErrorCode::InternalInvariant, "scale map: measure mismatch");
  std::vector<AffinePiece> pieces;
  std::size_t di = 0;
  Rat dpos = dst.empty() ? Rat(0) : dst.intervals()[0].lo;
  for (const auto& siv : src.intervals()) {
    Rat spos = siv.lo;
    while (spos < siv.hi) {
      const Interval& div = dst.intervals()[di];
      Rat davail = div.hi - dpos;
      Rat sneed = (siv.hi - spos) * slope;
      Rat take = rat_min(davail, sneed);  // length in dst coordinates
      Rat slen = take / slope;
      pieces.push_back({Interval(spos, spos + slen), slope, dpos - slope * spos});
      spos += slen;
      dpos += take;
      if (dpos == div.hi && di + 1 < dst.size()) {
        ++di;
        dpos = dst.intervals()[di].lo;
      }
      budget.check(pieces.size());
    }
  }
  return PiecewiseAffineMap::from_pieces(std::move(pieces), budget);
}

std::ostream& operator<<(std::ostream& os, const PiecewiseAffineMap& f) {
  for (const auto& p : f.pieces())
    os << "[" << p.source.lo << "," << p.source.hi << ") *" << p.slope << " +" << p.offset << "\n";
  return os;
}

}  // namespace towerplex

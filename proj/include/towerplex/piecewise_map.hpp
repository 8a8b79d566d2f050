#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "towerplex/interval_set.hpp"

namespace towerplex {

/// Hard cap on piece counts; operations that would exceed it abort instead of
/// silently degrading.
struct PieceBudget {
  std::size_t max_pieces = 1'000'000;
  void check(std::size_t count) const;
};

/// One affine piece: x -> slope*x + offset on the half-open source interval.
struct AffinePiece {
  Interval source;
  Rat slope;   // > 0
  Rat offset;

  Rat apply(const Rat& x) const { return slope * x + offset; }
  Interval image() const { return Interval(apply(source.lo), apply(source.hi)); }

  friend bool operator==(const AffinePiece& a, const AffinePiece& b) = default;
};

/// Invertible piecewise-affine map with positive rational slopes. Piece
/// sources partition the domain and piece images partition the range, so the
/// map is a bijection domain -> range. Slope-1 maps preserve Lebesgue
/// measure exactly.
///
/// Normal form: pieces sorted by source.lo, adjacent pieces with the same
/// affine law merged. Two maps are equal iff their normal forms are equal.
class PiecewiseAffineMap {
 public:
  PiecewiseAffineMap() = default;

  static PiecewiseAffineMap from_pieces(std::vector<AffinePiece> pieces,
                                        const PieceBudget& budget = {});
  static PiecewiseAffineMap identity(const IntervalSet& domain);

  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  std::size_t piece_count() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }

  const IntervalSet& domain() const { return domain_; }
  const IntervalSet& range() const { return range_; }

  bool is_measure_preserving() const;  // all slopes equal 1

  friend bool operator==(const PiecewiseAffineMap& a, const PiecewiseAffineMap& b) {
    return a.pieces_ == b.pieces_;
  }

 private:
  std::vector<AffinePiece> pieces_;
  IntervalSet domain_;
  IntervalSet range_;
};

Rat apply(const PiecewiseAffineMap& f, const Rat& x);
Rat apply_inverse(const PiecewiseAffineMap& f, const Rat& y);

PiecewiseAffineMap invert(const PiecewiseAffineMap& f);

/// f after g. Requires range(g) covered by domain(f).
PiecewiseAffineMap compose(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g,
                           const PieceBudget& budget = {});

/// k-fold composition; k = 0 gives the identity on domain(f), negative k
/// iterates the inverse. Requires domain(f) == range(f).
PiecewiseAffineMap iterate(const PiecewiseAffineMap& f, std::int64_t k,
                           const PieceBudget& budget = {});

IntervalSet image(const PiecewiseAffineMap& f, const IntervalSet& s);
IntervalSet preimage(const PiecewiseAffineMap& f, const IntervalSet& s);

/// Domain restriction to s (s must lie inside domain(f)).
PiecewiseAffineMap restrict(const PiecewiseAffineMap& f, const IntervalSet& s,
                            const PieceBudget& budget = {});

/// Union of maps with disjoint domains (and disjoint ranges).
PiecewiseAffineMap disjoint_union(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g,
                                  const PieceBudget& budget = {});

/// Set where the two maps disagree. Requires domain(f) == domain(g).
/// Where slopes differ the full refinement cell is reported; a crossing at a
/// single point is a null set and is not carved out.
IntervalSet difference_support(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g);

bool equal_on(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g, const IntervalSet& s);

/// Order-preserving piecewise-affine bijection src -> dst with constant
/// slope. Requires measure(dst) == slope * measure(src) exactly.
PiecewiseAffineMap order_preserving_scale_map(const IntervalSet& src, const IntervalSet& dst,
                                              const Rat& slope, const PieceBudget& budget = {});

std::ostream& operator<<(std::ostream& os, const PiecewiseAffineMap& f);

}  // namespace towerplex

#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "towerplex/rat.hpp"

namespace towerplex {

/// Half-open interval [lo, hi) with rational endpoints, lo < hi.
struct Interval {
  Rat lo;
  Rat hi;

  Interval(Rat lo_, Rat hi_);

  Rat length() const { return hi - lo; }
  bool contains(const Rat& x) const { return lo <= x && x < hi; }

  friend bool operator==(const Interval& a, const Interval& b) = default;
};

enum class SetOp { Union, Intersect, Difference, SymmetricDifference };

/// Finite disjoint union of half-open rational intervals, kept normalized:
/// sorted by lo, pairwise disjoint, adjacent intervals merged.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(Interval iv) : intervals_{std::move(iv)} {}

  /// Normalizes an arbitrary (possibly overlapping, unsorted) list.
  static IntervalSet from_intervals(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }

  Rat measure() const;
  bool contains(const Rat& x) const;
  bool contains_set(const IntervalSet& other) const;

  /// Hull bounds; require nonempty.
  const Rat& lower() const;
  const Rat& upper() const;

  friend bool operator==(const IntervalSet& a, const IntervalSet& b) = default;

 private:
  std::vector<Interval> intervals_;
};

IntervalSet set_algebra(const IntervalSet& a, const IntervalSet& b, SetOp op);

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b);
IntervalSet set_intersect(const IntervalSet& a, const IntervalSet& b);
IntervalSet set_difference(const IntervalSet& a, const IntervalSet& b);
IntervalSet set_symmetric_difference(const IntervalSet& a, const IntervalSet& b);

Rat measure(const IntervalSet& s);

/// Leftmost subset of `s` with the given measure (0 <= m <= measure(s)).
IntervalSet prefix_of_measure(const IntervalSet& s, const Rat& m);

std::ostream& operator<<(std::ostream& os, const IntervalSet& s);

}  // namespace towerplex

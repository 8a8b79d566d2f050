#include "towerplex/interval_set.hpp"

#include <algorithm>
#include <ostream>

#include "towerplex/errors.hpp"

namespace towerplex {

Interval::Interval(Rat lo_, Rat hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (!(lo < hi))
    throw Error(ErrorCode::InternalInvariant,
                "degenerate interval [" + lo.str() + ", " + hi.str() + ")");
}

IntervalSet IntervalSet::from_intervals(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet out;
  for (auto& iv : intervals) {
    if (!out.intervals_.empty() && iv.lo <= out.intervals_.back().hi) {
      if (iv.hi > out.intervals_.back().hi) out.intervals_.back().hi = iv.hi;
    } else {
      out.intervals_.push_back(std::move(iv));
    }
  }
  return out;
}

Rat IntervalSet::measure() const {
  Rat total(0);
  for (const auto& iv : intervals_) total += iv.length();
  return total;
}

bool IntervalSet::contains(const Rat& x) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](const Rat& v, const Interval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return false;
  return std::prev(it)->contains(x);
}

bool IntervalSet::contains_set(const IntervalSet& other) const {
  return set_difference(other, *this).empty();
}

const Rat& IntervalSet::lower() const {
  if (empty()) throw Error(ErrorCode::InternalInvariant, "hull of empty set");
  return intervals_.front().lo;
}

const Rat& IntervalSet::upper() const {
  if (empty()) throw Error(ErrorCode::InternalInvariant, "hull of empty set");
  return intervals_.back().hi;
}

IntervalSet set_algebra(const IntervalSet& a, const IntervalSet& b, SetOp op) {
  // Sweep over the merged endpoint list; membership is constant between
  // consecutive endpoints, so each gap is kept or dropped as a whole.
  std::vector<Rat> points;
  points.reserve(2 * (a.size() + b.size()));
  for (const auto& iv : a.intervals()) {
    points.push_back(iv.lo);
    points.push_back(iv.hi);
  }
  for (const auto& iv : b.intervals()) {
    points.push_back(iv.lo);
    points.push_back(iv.hi);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  auto keep = [op](bool in_a, bool in_b) {
    switch (op) {
      case SetOp::Union: return in_a || in_b;
      case SetOp::Intersect: return in_a && in_b;
      case SetOp::Difference: return in_a && !in_b;
      case SetOp::SymmetricDifference: return in_a != in_b;
    }
    return false;
  };

  std::vector<Interval> out;
  Rat half(1, 2);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    Rat mid = (points[i] + points[i + 1]) * half;
    if (!keep(a.contains(mid), b.contains(mid))) continue;
    if (!out.empty() && out.back().hi == points[i])
      out.back().hi = points[i + 1];
    else
      out.emplace_back(points[i], points[i + 1]);
  }
  return IntervalSet::from_intervals(std::move(out));
}

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
  return set_algebra(a, b, SetOp::Union);
}
IntervalSet set_intersect(const IntervalSet& a, const IntervalSet& b) {
  return set_algebra(a, b, SetOp::Intersect);
}
IntervalSet set_difference(const IntervalSet& a, const IntervalSet& b) {
  return set_algebra(a, b, SetOp::Difference);
}
IntervalSet set_symmetric_difference(const IntervalSet& a, const IntervalSet& b) {
  return set_algebra(a, b, SetOp::SymmetricDifference);
}

Rat measure(const IntervalSet& s) { return s.measure(); }

IntervalSet prefix_of_measure(const IntervalSet& s, const Rat& m) {
  if (m.sign() < 0 || m > s.measure())
    throw Error(ErrorCode::InternalInvariant,
                "prefix measure " + m.str() + " outside [0, " + s.measure().str() + "]");
  std::vector<Interval> out;
  Rat remaining = m;
  for (const auto& iv : s.intervals()) {
    if (remaining.is_zero()) break;
    Rat len = iv.length();
    if (len <= remaining) {
      out.push_back(iv);
      remaining -= len;
    } else {
      out.emplace_back(iv.lo, iv.lo + remaining);
      remaining = Rat(0);
    }
  }
  return IntervalSet::from_intervals(std::move(out));
}

std::ostream& operator<<(std::ostream& os, const IntervalSet& s) {
  bool first = true;
  for (const auto& iv : s.intervals()) {
    if (!first) os << " ";
    os << "[" << iv.lo << "," << iv.hi << ")";
    first = false;
  }
  if (first) os << "(empty)";
  return os;
}

}  // namespace towerplex

#pragma once

// Test-only reference machinery, independent of the library's computation
// paths: a cell-counting grid model for slope-1 maps and the closed-form
// binary adding machine.

#include <cstdint>
#include <numeric>
#include <vector>

#include "towerplex/piecewise_map.hpp"

namespace towerplex::testing {

inline void lcm_accumulate(mpz_class& acc, const Rat& r) {
  mpz_class l;
  mpz_lcm(l.get_mpz_t(), acc.get_mpz_t(), r.den().get_mpz_t());
  acc = l;
}

inline std::uint64_t grid_resolution(const std::vector<const PiecewiseAffineMap*>& maps,
                                     const std::vector<const IntervalSet*>& sets) {
  mpz_class acc(1);
  for (const auto* f : maps)
    for (const auto& p : f->pieces()) {
      lcm_accumulate(acc, p.source.lo);
      lcm_accumulate(acc, p.source.hi);
      lcm_accumulate(acc, p.offset);
    }
  for (const auto* s : sets)
    for (const auto& iv : s->intervals()) {
      lcm_accumulate(acc, iv.lo);
      lcm_accumulate(acc, iv.hi);
    }
  if (!acc.fits_ulong_p()) throw std::runtime_error("grid resolution overflow");
  return acc.get_ui();
}

/// Discretizes [0, sup) into cells of width 1/L and realizes slope-1 maps as
/// cell permutations. Every measure becomes an exact cell count over L.
class GridOracle {
 public:
  GridOracle(const PiecewiseAffineMap& map, std::uint64_t l) : l_(l) {
    Rat sup = map.domain().upper();
    Rat cells_r = sup * Rat(static_cast<long>(l));
    total_ = static_cast<std::uint64_t>(cells_r.to_int64());
    perm_.assign(total_, UINT64_MAX);
    for (const auto& p : map.pieces()) {
      if (!(p.slope == Rat(1))) throw std::runtime_error("grid oracle needs slope-1 maps");
      std::int64_t lo = index_of(p.source.lo), hi = index_of(p.source.hi);
      std::int64_t shift = (Rat(static_cast<long>(l)) * p.offset).to_int64();
      for (std::int64_t c = lo; c < hi; ++c)
        perm_[static_cast<std::size_t>(c)] = static_cast<std::uint64_t>(c + shift);
    }
  }

  std::vector<bool> cells(const IntervalSet& s) const {
    std::vector<bool> out(total_, false);
    for (const auto& iv : s.intervals()) {
      std::int64_t lo = index_of(iv.lo), hi = index_of(iv.hi);
      for (std::int64_t c = lo; c < hi; ++c) out[static_cast<std::size_t>(c)] = true;
    }
    return out;
  }

  std::vector<bool> step(const std::vector<bool>& s) const {
    std::vector<bool> out(total_, false);
    for (std::size_t c = 0; c < total_; ++c)
      if (s[c]) {
        if (perm_[c] == UINT64_MAX) throw std::runtime_error("cell leaves oracle domain");
        out[perm_[c]] = true;
      }
    return out;
  }

  std::vector<bool> step_back(const std::vector<bool>& s) const {
    std::vector<bool> out(total_, false);
    for (std::size_t c = 0; c < total_; ++c)
      if (perm_[c] != UINT64_MAX && s[perm_[c]]) out[c] = true;
    return out;
  }

  Rat measure_and(const std::vector<bool>& a, const std::vector<bool>& b) const {
    std::uint64_t count = 0;
    for (std::size_t c = 0; c < total_; ++c)
      if (a[c] && b[c]) ++count;
    return Rat(static_cast<long>(count)) / Rat(static_cast<long>(l_));
  }

  Rat measure_symdiff(const std::vector<bool>& a, const std::vector<bool>& b) const {
    std::uint64_t count = 0;
    for (std::size_t c = 0; c < total_; ++c)
      if (a[c] != b[c]) ++count;
    return Rat(static_cast<long>(count)) / Rat(static_cast<long>(l_));
  }

  Rat measure(const std::vector<bool>& a) const {
    std::uint64_t count = 0;
    for (std::size_t c = 0; c < total_; ++c)
      if (a[c]) ++count;
    return Rat(static_cast<long>(count)) / Rat(static_cast<long>(l_));
  }

  std::uint64_t resolution() const { return l_; }

 private:
  std::int64_t index_of(const Rat& x) const {
    return (Rat(static_cast<long>(l_)) * x).to_int64();
  }

  std::uint64_t l_;
  std::uint64_t total_;
  std::vector<std::uint64_t> perm_;
};

/// Closed-form binary adding machine on [0,1): add one to the lowest binary
/// digit with carry rightward.
inline Rat adding_machine(const Rat& x) {
  Rat one(1), half(1, 2);
  // x in [1 - 2^{1-k}, 1 - 2^{-k})  =>  x - 1 + 3 * 2^{-k}
  Rat pow(1, 2);
  while (true) {
    Rat next_low = one - pow - pow;  // 1 - 2^{1-k}
    Rat hi = one - pow;              // 1 - 2^{-k}
    if (x >= next_low && x < hi) return x - one + Rat(3) * pow;
    pow = pow * half;
    if (pow.den() > mpz_class(1) << 200) throw std::runtime_error("adding machine diverged");
  }
}

inline Rat adding_machine_iterate(Rat x, std::uint64_t k) {
  for (std::uint64_t i = 0; i < k; ++i) x = adding_machine(x);
  return x;
}

}  // namespace towerplex::testing

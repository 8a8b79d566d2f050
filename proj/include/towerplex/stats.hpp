#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "towerplex/piecewise_map.hpp"

namespace towerplex {

/// Intrinsic weight sequence of F: u_k = mu(F ∩ T^k F) / mu(F)^2 and its
/// partial sums a_N = sum_{k<N} u_k.
struct WeightSequence {
  IntervalSet f;
  std::vector<Rat> u;
  std::vector<Rat> a;  // a[k] = u[0] + ... + u[k]
};

WeightSequence weight_sequence(const PiecewiseAffineMap& t, const IntervalSet& f, std::size_t k,
                               const PieceBudget& budget = {});

struct ReportRow {
  std::uint64_t index = 0;
  Rat term;
  Rat partial;  // exact prefix sum of terms
};

/// One diagnostic series with the normalizer used and its final value.
struct SumReport {
  std::string kind;
  std::vector<ReportRow> rows;
  Rat normalizer;  // divisor applied to the raw prefix sum
  Rat value;
};

/// (1/a_N) * sum_{k<N} |mu(A ∩ T^k B) - mu(A) mu(B) u_k(F)|.
SumReport rwm_sum(const PiecewiseAffineMap& t, const IntervalSet& f, const IntervalSet& a,
                  const IntervalSet& b, std::size_t n, const PieceBudget& budget = {});

/// (mu(Xn)^2 / N) * sum_{i<N} |mu(A ∩ T^i A) - mu(A)^2 / mu(Xn)|.
SumReport scaled_rwm_sum(const PiecewiseAffineMap& t, const IntervalSet& a, std::size_t n,
                         const Rat& mu_xn, const PieceBudget& budget = {});

/// (mu(Xn) / N) * sum_{i<N} |mu(E ∩ T^i A) - mu(E) mu(A) / mu(Xn)|.
SumReport mixed_scaled_sum(const PiecewiseAffineMap& t, const IntervalSet& e, const IntervalSet& a,
                           std::size_t n, const Rat& mu_xn, const PieceBudget& budget = {});

/// mu(T^rho A △ A).
Rat rigidity_deviation(const PiecewiseAffineMap& t, const IntervalSet& a, std::uint64_t rho,
                       const PieceBudget& budget = {});

/// Cartesian power diagnostics act coordinatewise; boxes stay boxes, so
/// every product-measure term factorizes into one factor per coordinate.
struct ProductSpec {
  std::vector<int> exponents;  // nonzero, 1 <= length <= 3

  void validate() const;
};

/// mu⊗(A ∩ (T^{v1} x ... x T^{vl})^i B) for boxes A, B.
Rat product_correlation(const ProductSpec& spec, const PiecewiseAffineMap& t,
                        const std::vector<IntervalSet>& a_box,
                        const std::vector<IntervalSet>& b_box, std::uint64_t i,
                        const PieceBudget& budget = {});

/// (mu(Xn)^2 / N) * sum_{i<N} |mu⊗(A ∩ P^i A) - mu⊗(A)^2 / mu(Xn)| where P is
/// the coordinatewise power map of `spec`.
SumReport product_scaled_sum(const ProductSpec& spec, const PiecewiseAffineMap& t,
                             const std::vector<IntervalSet>& a_box, std::size_t n,
                             const Rat& mu_xn, const PieceBudget& budget = {});

/// mu(domain(T) \ union_{i<=N} T^i F) — the unswept remainder at horizon N.
Rat sweep_out(const PiecewiseAffineMap& t, const IntervalSet& f, std::uint64_t n,
              const PieceBudget& budget = {});
SumReport sweep_out_report(const PiecewiseAffineMap& t, const IntervalSet& f, std::uint64_t n,
                           const PieceBudget& budget = {});

/// Incremental form of product_scaled_sum used by the parameter search:
/// advance() appends the term at the next index, value(N) returns the
/// normalized sum over the first N terms.
class ScaledSumTracker {
 public:
  ScaledSumTracker(const PiecewiseAffineMap& t, std::vector<int> exponents, IntervalSet a,
                   Rat mu_xn, const PieceBudget& budget = {});

  void advance();
  std::uint64_t steps() const { return steps_; }
  Rat value(std::uint64_t n) const;
  const Rat& last_term() const { return last_term_; }

 private:
  std::vector<PiecewiseAffineMap> step_maps_;
  std::vector<IntervalSet> iterates_;
  IntervalSet a_;
  Rat mu_a_box_;
  Rat target_;  // mu⊗(A)^2 / mu(Xn)
  Rat mu_xn_sq_;
  Rat prefix_;
  Rat last_term_;
  std::uint64_t steps_ = 0;
  PieceBudget budget_;
};

}  // namespace towerplex

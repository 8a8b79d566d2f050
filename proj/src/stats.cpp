#include "towerplex/stats.hpp"

#include "towerplex/errors.hpp"

namespace towerplex {

WeightSequence weight_sequence(const PiecewiseAffineMap& t, const IntervalSet& f, std::size_t k,
                               const PieceBudget& budget) {
  if (k == 0) throw Error(ErrorCode::ConfigInvalid, "weight sequence needs K >= 1");
  if (!t.domain().contains_set(f))
    throw Error(ErrorCode::SetOutsideDomain, "F not inside the transformation's domain");
  Rat mu_f = f.measure();
  if (mu_f.is_zero()) throw Error(ErrorCode::ZeroNormalizer, "F has measure zero");
  Rat mu_f_sq = mu_f * mu_f;

  WeightSequence w;
  w.f = f;
  w.u.reserve(k);
  w.a.reserve(k);
  IntervalSet fk = f;
  Rat acc(0);
  for (std::size_t i = 0; i < k; ++i) {
    if (i > 0) fk = image(t, fk);
    budget.check(fk.size());
    Rat u = set_intersect(f, fk).measure() / mu_f_sq;
    acc += u;
    w.u.push_back(u);
    w.a.push_back(acc);
  }
  return w;
}

SumReport rwm_sum(const PiecewiseAffineMap& t, const IntervalSet& f, const IntervalSet& a,
                  const IntervalSet& b, std::size_t n, const PieceBudget& budget) {
  if (!f.contains_set(a) || !f.contains_set(b))
    throw Error(ErrorCode::SetOutsideDomain, "A and B must lie inside F");
  WeightSequence w = weight_sequence(t, f, n, budget);
  Rat mu_a = a.measure(), mu_b = b.measure();

  SumReport report;
  report.kind = "rwm";
  Rat prefix(0);
  IntervalSet bk = b;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) bk = image(t, bk);
    budget.check(bk.size());
    Rat term = (set_intersect(a, bk).measure() - mu_a * mu_b * w.u[i]).abs();
    prefix += term;
    report.rows.push_back({i, term, prefix});
  }
  report.normalizer = w.a[n - 1];
  if (report.normalizer.is_zero())
    throw Error(ErrorCode::ZeroNormalizer, "a_N vanishes; no normalization possible");
  report.value = prefix / report.normalizer;
  return report;
}

SumReport scaled_rwm_sum(const PiecewiseAffineMap& t, const IntervalSet& a, std::size_t n,
                         const Rat& mu_xn, const PieceBudget& budget) {
  ProductSpec degenerate{{1}};
  return product_scaled_sum(degenerate, t, {a}, n, mu_xn, budget);
}

SumReport mixed_scaled_sum(const PiecewiseAffineMap& t, const IntervalSet& e, const IntervalSet& a,
                           std::size_t n, const Rat& mu_xn, const PieceBudget& budget) {
  if (n == 0) throw Error(ErrorCode::ConfigInvalid, "sum horizon must be >= 1");
  if (mu_xn.sign() <= 0) throw Error(ErrorCode::ZeroNormalizer, "mu(Xn) must be positive");
  Rat target = e.measure() * a.measure() / mu_xn;

  SumReport report;
  report.kind = "mixed";
  Rat prefix(0);
  IntervalSet ak = a;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) ak = image(t, ak);
    budget.check(ak.size());
    Rat term = (set_intersect(e, ak).measure() - target).abs();
    prefix += term;
    report.rows.push_back({i, term, prefix});
  }
  report.normalizer = Rat(static_cast<long>(n)) / mu_xn;
  report.value = prefix / report.normalizer;
  return report;
}

Rat rigidity_deviation(const PiecewiseAffineMap& t, const IntervalSet& a, std::uint64_t rho,
                       const PieceBudget& budget) {
  IntervalSet ak = a;
  for (std::uint64_t i = 0; i < rho; ++i) {
    ak = image(t, ak);
    budget.check(ak.size());
  }
  return set_symmetric_difference(ak, a).measure();
}

void ProductSpec::validate() const {
  if (exponents.empty() || exponents.size() > 3)
    throw Error(ErrorCode::ConfigInvalid, "product length must be between 1 and 3");
  for (int e : exponents)
    if (e == 0) throw Error(ErrorCode::ConfigInvalid, "product exponents must be nonzero");
}

Rat product_correlation(const ProductSpec& spec, const PiecewiseAffineMap& t,
                        const std::vector<IntervalSet>& a_box,
                        const std::vector<IntervalSet>& b_box, std::uint64_t i,
                        const PieceBudget& budget) {
  spec.validate();
  if (a_box.size() != spec.exponents.size() || b_box.size() != spec.exponents.size())
    throw Error(ErrorCode::ConfigInvalid, "box arity must match the exponent vector");
  Rat product(1);
  for (std::size_t j = 0; j < spec.exponents.size(); ++j) {
    PiecewiseAffineMap step = iterate(t, spec.exponents[j], budget);
    IntervalSet bk = b_box[j];
    for (std::uint64_t s = 0; s < i; ++s) {
      bk = image(step, bk);
      budget.check(bk.size());
    }
    product *= set_intersect(a_box[j], bk).measure();
    if (product.is_zero()) return product;
  }
  return product;
}

ScaledSumTracker::ScaledSumTracker(const PiecewiseAffineMap& t, std::vector<int> exponents,
                                   IntervalSet a, Rat mu_xn, const PieceBudget& budget)
    : a_(std::move(a)), budget_(budget) {
  ProductSpec spec{std::move(exponents)};
  spec.validate();
  if (mu_xn.sign() <= 0) throw Error(ErrorCode::ZeroNormalizer, "mu(Xn) must be positive");
  mu_a_box_ = Rat(1);
  for (std::size_t j = 0; j < spec.exponents.size(); ++j) {
    step_maps_.push_back(iterate(t, spec.exponents[j], budget));
    iterates_.push_back(a_);
    mu_a_box_ *= a_.measure();
  }
  target_ = mu_a_box_ * mu_a_box_ / mu_xn;
  mu_xn_sq_ = mu_xn * mu_xn;
  prefix_ = Rat(0);
  last_term_ = Rat(0);
}

void ScaledSumTracker::advance() {
  // Term at index i = steps_: iterates hold T^{v_j * i}(A) entering the call.
  Rat corr(1);
  for (std::size_t j = 0; j < step_maps_.size(); ++j)
    corr *= set_intersect(a_, iterates_[j]).measure();
  last_term_ = (corr - target_).abs();
  prefix_ += last_term_;
  for (std::size_t j = 0; j < step_maps_.size(); ++j) {
    iterates_[j] = image(step_maps_[j], iterates_[j]);
    budget_.check(iterates_[j].size());
  }
  ++steps_;
}

Rat ScaledSumTracker::value(std::uint64_t n) const {
  if (n == 0 || n != steps_)
    throw Error(ErrorCode::InternalInvariant, "tracker value requested off the advanced index");
  return mu_xn_sq_ * prefix_ / Rat(static_cast<long>(n));
}

SumReport product_scaled_sum(const ProductSpec& spec, const PiecewiseAffineMap& t,
                             const std::vector<IntervalSet>& a_box, std::size_t n,
                             const Rat& mu_xn, const PieceBudget& budget) {
  spec.validate();
  if (n == 0) throw Error(ErrorCode::ConfigInvalid, "sum horizon must be >= 1");
  if (a_box.size() != spec.exponents.size())
    throw Error(ErrorCode::ConfigInvalid, "box arity must match the exponent vector");
  for (std::size_t j = 1; j < a_box.size(); ++j)
    if (!(a_box[j] == a_box[0]))
      throw Error(ErrorCode::ConfigInvalid, "scaled product sums take a diagonal box");

  ScaledSumTracker tracker(t, spec.exponents, a_box[0], mu_xn, budget);
  SumReport report;
  report.kind = "scaled";
  for (std::size_t i = 0; i < n; ++i) {
    tracker.advance();
    Rat term = tracker.last_term();
    Rat prev = report.rows.empty() ? Rat(0) : report.rows.back().partial;
    report.rows.push_back({i, term, prev + term});
  }
  report.normalizer = Rat(static_cast<long>(n)) / (mu_xn * mu_xn);
  report.value = tracker.value(n);
  return report;
}

SumReport sweep_out_report(const PiecewiseAffineMap& t, const IntervalSet& f, std::uint64_t n,
                           const PieceBudget& budget) {
  if (!t.domain().contains_set(f))
    throw Error(ErrorCode::SetOutsideDomain, "F not inside the transformation's domain");
  SumReport report;
  report.kind = "sweep";
  IntervalSet covered = f;
  Rat total = t.domain().measure();
  report.rows.push_back({0, total - covered.measure(), total - covered.measure()});
  for (std::uint64_t i = 1; i <= n; ++i) {
    covered = set_union(covered, image(t, covered));
    budget.check(covered.size());
    Rat unswept = total - covered.measure();
    report.rows.push_back({i, unswept, unswept});
  }
  report.normalizer = Rat(1);
  report.value = report.rows.back().term;
  return report;
}

Rat sweep_out(const PiecewiseAffineMap& t, const IntervalSet& f, std::uint64_t n,
              const PieceBudget& budget) {
  return sweep_out_report(t, f, n, budget).value;
}

}  // namespace towerplex

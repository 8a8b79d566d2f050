#include "towerplex/scheduler.hpp"

#include <algorithm>

#include "towerplex/errors.hpp"

namespace towerplex {

namespace {

// Entry alphabet in canonical order: -1, 1, -2, 2, ..., -max, max.
int alphabet_entry(std::size_t idx) {
  int magnitude = static_cast<int>(idx / 2) + 1;
  return (idx % 2 == 0) ? -magnitude : magnitude;
}

}  // namespace

std::vector<std::vector<int>> enumerate_vectors(std::size_t count, std::size_t max_len,
                                                std::size_t max_abs) {
  if (count == 0) throw Error(ErrorCode::ConfigInvalid, "vector count must be >= 1");
  std::vector<std::vector<int>> out;
  for (std::size_t len = 1; len <= max_len && out.size() < count; ++len) {
    for (std::size_t mx = 1; mx <= max_abs && out.size() < count; ++mx) {
      // All length-len vectors over entries with |e| <= mx, in lexicographic
      // order of the alphabet, keeping those with max|e| == mx.
      std::vector<std::size_t> digits(len, 0);
      const std::size_t radix = 2 * mx;
      while (true) {
        std::size_t top = 0;
        std::vector<int> v(len);
        for (std::size_t i = 0; i < len; ++i) {
          v[i] = alphabet_entry(digits[i]);
          top = std::max<std::size_t>(top, static_cast<std::size_t>(std::abs(v[i])));
        }
        if (top == mx) {
          out.push_back(std::move(v));
          if (out.size() == count) break;
        }
        // Increment the digit vector (last digit fastest).
        std::size_t pos = len;
        while (pos > 0) {
          --pos;
          if (++digits[pos] < radix) break;
          digits[pos] = 0;
          if (pos == 0) goto group_done;
        }
      }
    group_done:;
    }
  }
  if (out.size() < count)
    throw Error(ErrorCode::UniverseExhausted,
                "only " + std::to_string(out.size()) + " vectors exist under the caps");
  return out;
}

MSearchResult choose_m(const MSearchRequest& req) {
  if (req.delta.sign() <= 0) throw Error(ErrorCode::ConfigInvalid, "delta must be positive");
  if (req.floor >= req.search_cap)
    throw Error(ErrorCode::SearchCapExceeded,
                "search window (floor " + std::to_string(req.floor) + ", cap " +
                    std::to_string(req.search_cap) + "] is empty");
  if (req.check_rigidity && (!req.rho || req.rho->terms.empty()))
    throw Error(ErrorCode::ConfigInvalid, "rigidity predicate enabled without a sequence");

  std::vector<ScaledSumTracker> trackers;
  for (const auto& cell : req.cells) {
    if (cell.empty()) continue;
    for (const auto& v : req.vectors)
      trackers.emplace_back(req.r_map, v, cell, req.mu_x, req.budget);
  }

  std::optional<Rat> best;
  // Rigidity deviations are reevaluated only when the active return time
  // (largest rho <= M) changes.
  std::optional<std::uint64_t> rho_checked;
  bool rho_ok = true;

  for (std::uint64_t m = 1; m <= req.search_cap; ++m) {
    for (auto& tr : trackers) tr.advance();
    if (m <= req.floor) continue;

    Rat worst(0);
    for (auto& tr : trackers) worst = rat_max(worst, tr.value(m));
    if (!best || worst < *best) best = worst;

    if (req.check_rigidity) {
      std::uint64_t rho_active = 0;
      for (std::uint64_t rho : req.rho->terms)
        if (rho <= m) rho_active = rho;
      if (!rho_checked || *rho_checked != rho_active) {
        rho_checked = rho_active;
        rho_ok = true;
        if (rho_active > 0)
          for (const auto& cell : req.cells) {
            if (cell.empty()) continue;
            if (!(rigidity_deviation(req.r_map, cell, rho_active, req.budget) < req.delta)) {
              rho_ok = false;
              break;
            }
          }
      }
      if (!rho_ok) continue;
    }

    if (trackers.empty() || worst < req.delta) return {m, worst};
  }
  throw Error(ErrorCode::SearchCapExceeded,
              "no admissible M within cap " + std::to_string(req.search_cap) +
                  "; best sum achieved " + (best ? best->str() : std::string("none")));
}

std::pair<Rat, std::uint64_t> choose_eps_h(std::uint64_t m, int n, const Rat& eps_prev) {
  if (m == 0 || n < 1 || eps_prev.sign() <= 0)
    throw Error(ErrorCode::ConfigInvalid, "choose_eps_h needs M >= 1, n >= 1, eps_prev > 0");
  Rat nm = Rat(static_cast<long>(n)) * Rat(static_cast<long>(m));
  Rat eps = largest_pow2_strictly_below(eps_prev / nm);
  std::uint64_t h = smallest_pow2_strictly_above(rat_max(nm / eps_prev, Rat(static_cast<long>(m))));
  return {eps, h};
}

void ScheduleParams::validate() const {
  std::size_t stages = m.size();
  if (delta.size() != stages || eps.size() != stages || h.size() != stages)
    throw Error(ErrorCode::ConfigInvalid, "ragged schedule");
  for (std::size_t i = 0; i < stages; ++i) {
    std::uint64_t h_prev = i == 0 ? 1 : h[i - 1];
    std::uint64_t m_prev = i == 0 ? 1 : m[i - 1];
    const Rat eps_prev = i == 0 ? eps0 : eps[i - 1];
    long n = static_cast<long>(i) + 1;
    if (!(m[i] > std::max(h_prev, m_prev)))
      throw Error(ErrorCode::ConfigInvalid,
                  "M_" + std::to_string(n) + " must exceed max(h, M) of the previous stage");
    Rat nm = Rat(n) * Rat(static_cast<long>(m[i]));
    if (!(eps[i] * nm < eps_prev))
      throw Error(ErrorCode::ConfigInvalid, "eps_n n M_n < eps_{n-1} violated at stage " +
                                                std::to_string(n));
    if (!(nm / Rat(static_cast<long>(h[i])) < eps_prev))
      throw Error(ErrorCode::ConfigInvalid, "(1/h_n) n M_n < eps_{n-1} violated at stage " +
                                                std::to_string(n));
  }
}

}  // namespace towerplex

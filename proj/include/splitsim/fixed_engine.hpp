#pragma once

#include <optional>
#include <vector>

#include "splitsim/engine.hpp"

namespace splitsim {

// Fast path for large pointwise 2D runs. Masses are tracked as certified
// enclosures [lo, hi] in signed 128-bit fixed point at scale 2^-96; addition
// is exact on this grid and the quarter-share rounds lo down and hi up, so
// the true dyadic mass always stays inside its enclosure. Every instability
// test must be decided by the enclosure (lo >= 1 or hi < 1); if one is not,
// the run aborts rather than guess. A completed run therefore produces the
// same toppled set and split schedule as exact rational arithmetic, at a
// small fixed cost per operation instead of numbers that grow by two bits
// per step.
//
// Width growth is tame: a splitter's enclosure resets to exactly zero, and a
// neighbor inherits a quarter of the splitter's width plus one ulp, so the
// slack stays near the 2^-96 scale while typical decisions sit at distance
// 2^-40 or more from the threshold. A failure is possible in principle and
// is reported, never rounded away.
struct CertificationFailure : std::runtime_error {
  Site site;
  long long t;
  CertificationFailure(Site s, long long t_)
      : std::runtime_error("instability not certified by the fixed-point "
                           "enclosure; rerun with the exact engine"),
        site(s),
        t(t_) {}
};

struct FixedRunResult {
  bool stabilized = false;
  long long steps = 0;
  long long total_splits = 0;
  long long radius_linf = 0;
  Region toppled;
  std::vector<StepStats> series;
};

namespace fixed_detail {

using I128 = __int128;

inline constexpr int kFracBits = 96;

// Exact conversion: requires a dyadic rational with at most kFracBits
// fractional bits and a small integer part.
inline std::optional<I128> to_fixed(const Rational& r) {
  using boost::multiprecision::msb;
  const BigInt& den = r.den();
  if (den != 1) {
    unsigned long bit = mpz_scan1(den.backend().data(), 0);
    if ((BigInt(1) << bit) != den) return std::nullopt;  // not a power of two
    if (bit > kFracBits) return std::nullopt;
  }
  unsigned long den_bits = den == 1 ? 0 : mpz_scan1(den.backend().data(), 0);
  BigInt scaled = r.num() << (kFracBits - den_bits);
  BigInt mag = scaled < 0 ? BigInt(-scaled) : scaled;
  if (mag != 0 && msb(mag) >= 126) return std::nullopt;
  I128 out = 0;
  BigInt tmp = mag;
  int shift = 0;
  while (tmp != 0) {
    out |= (I128)(unsigned long long)(tmp & 0xffffffffffffffffull) << shift;
    tmp >>= 64;
    shift += 64;
  }
  return scaled < 0 ? -out : out;
}

}  // namespace fixed_detail

// Parallel-order run of the point-source configuration (mass n at the
// origin, background h) in two dimensions. Both n and h must be exactly
// representable in the fixed-point grid.
class FixedEngine2D {
 public:
  FixedEngine2D(const Rational& n, const Rational& h) {
    if (!(h < Rational(1)))
      throw std::invalid_argument("background must satisfy h < 1");
    auto nf = fixed_detail::to_fixed(n);
    auto hf = fixed_detail::to_fixed(h);
    if (!nf || !hf)
      throw std::invalid_argument(
          "fixed-point engine needs dyadic n and h of bounded size");
    n_fixed_ = *nf;
    h_fixed_ = *hf;
    resize(kInitialRadius);
    cell(0, 0).lo = cell(0, 0).hi = n_fixed_;
    explicit_mark_[index(0, 0)] = 1;
    candidates_.push_back(index(0, 0));
  }

  FixedRunResult run(long long max_steps, long long max_radius) {
    FixedRunResult out;
    std::vector<size_t> splitters;
    std::vector<size_t> next;
    const fixed_detail::I128 one = (fixed_detail::I128)1 << fixed_detail::kFracBits;
    while (true) {
      splitters.clear();
      for (size_t idx : candidates_) {
        const Cell& c = cells_[idx];
        if (c.lo >= one) {
          splitters.push_back(idx);
        } else if (c.hi >= one) {
          throw CertificationFailure(site_of(idx), out.steps);
        }
      }
      out.series.push_back({out.steps, splitters.size(), toppled_count_, {}});
      if (splitters.empty()) {
        out.stabilized = true;
        break;
      }
      if (out.steps >= max_steps) break;

      // Grid growth before applying, so neighbor indices stay valid.
      long long reach = 0;
      for (size_t idx : splitters)
        reach = std::max(reach, site_of(idx).linf_norm());
      out.radius_linf = std::max(out.radius_linf, reach);
      if (out.radius_linf > max_radius) break;
      if (reach + 1 >= radius_) {
        long long want = radius_;
        while (reach + 1 >= want) want += want / 2 + 8;
        regrow(std::min<long long>(want, max_radius + 2), splitters);
      }

      next.clear();
      for (size_t idx : splitters) {
        Cell& c = cells_[idx];
        fixed_detail::I128 qlo = c.lo >> 2;
        fixed_detail::I128 qhi = (c.hi + 3) >> 2;
        c.lo = 0;
        c.hi = 0;
        if (split_count_[idx]++ == 0) ++toppled_count_;
        ++out.total_splits;
        size_t nbs[4] = {idx - 1, idx + 1, idx - row_, idx + row_};
        for (size_t nb : nbs) {
          Cell& t = cells_[nb];
          if (!explicit_mark_[nb]) {
            explicit_mark_[nb] = 1;
            t.lo = h_fixed_;
            t.hi = h_fixed_;
          }
          t.lo += qlo;
          t.hi += qhi;
          if (stamp_[nb] != epoch_) {
            stamp_[nb] = epoch_;
            next.push_back(nb);
          }
        }
        if (stamp_[idx] != epoch_) {
          stamp_[idx] = epoch_;
          next.push_back(idx);
        }
      }
      candidates_.swap(next);
      ++epoch_;
      ++out.steps;
    }

    for (size_t idx = 0; idx < cells_.size(); ++idx)
      if (split_count_[idx] > 0) out.toppled.insert(site_of(idx));
    return out;
  }

 private:
  struct Cell {
    fixed_detail::I128 lo = 0;
    fixed_detail::I128 hi = 0;
  };
  static constexpr long long kInitialRadius = 64;

  size_t index(long long x, long long y) const {
    return (size_t)(y + radius_) * row_ + (size_t)(x + radius_);
  }
  Site site_of(size_t idx) const {
    long long y = (long long)(idx / row_) - radius_;
    long long x = (long long)(idx % row_) - radius_;
    return Site::of({(int32_t)x, (int32_t)y});
  }

  Cell& cell(long long x, long long y) { return cells_[index(x, y)]; }

  void resize(long long radius) {
    radius_ = radius;
    row_ = (size_t)(2 * radius + 1);
    cells_.assign(row_ * row_, Cell{});
    split_count_.assign(row_ * row_, 0);
    explicit_mark_.assign(row_ * row_, 0);
    stamp_.assign(row_ * row_, 0);
    epoch_ = 1;
  }

  void regrow(long long new_radius, std::vector<size_t>& live_indices) {
    if (new_radius <= radius_) return;
    std::vector<Cell> old_cells = std::move(cells_);
    std::vector<uint32_t> old_splits = std::move(split_count_);
    std::vector<uint8_t> old_explicit = std::move(explicit_mark_);
    long long old_radius = radius_;
    size_t old_row = row_;
    std::vector<size_t> old_candidates = std::move(candidates_);
    resize(new_radius);
    auto old_site = [&](size_t idx) {
      long long y = (long long)(idx / old_row) - old_radius;
      long long x = (long long)(idx % old_row) - old_radius;
      return std::pair<long long, long long>(x, y);
    };
    for (size_t idx = 0; idx < old_cells.size(); ++idx) {
      if (!old_explicit[idx] && old_splits[idx] == 0) continue;
      auto [x, y] = old_site(idx);
      size_t ni = index(x, y);
      cells_[ni] = old_cells[idx];
      split_count_[ni] = old_splits[idx];
      explicit_mark_[ni] = old_explicit[idx];
    }
    candidates_.clear();
    for (size_t idx : old_candidates) {
      auto [x, y] = old_site(idx);
      candidates_.push_back(index(x, y));
    }
    for (size_t& idx : live_indices) {
      auto [x, y] = old_site(idx);
      idx = index(x, y);
    }
  }

  long long radius_ = 0;
  size_t row_ = 0;
  std::vector<Cell> cells_;
  std::vector<uint32_t> split_count_;
  std::vector<uint8_t> explicit_mark_;
  std::vector<uint32_t> stamp_;
  uint32_t epoch_ = 1;
  std::vector<size_t> candidates_;
  fixed_detail::I128 n_fixed_ = 0;
  fixed_detail::I128 h_fixed_ = 0;
  long long toppled_count_ = 0;
};

inline FixedRunResult run_fixed_parallel_2d(const Rational& n, const Rational& h,
                                            long long max_steps,
                                            long long max_radius) {
  FixedEngine2D engine(n, h);
  return engine.run(max_steps, max_radius);
}

}  // namespace splitsim

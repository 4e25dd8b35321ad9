#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <future>
#include <optional>
#include <string>
#include <vector>

#include "splitsim/constants.hpp"
#include "splitsim/engine.hpp"
#include "splitsim/green.hpp"
#include "splitsim/shape.hpp"

namespace splitsim {

using Float50 = boost::multiprecision::cpp_bin_float_50;

struct NotStabilized : std::logic_error {
  explicit NotStabilized(const std::string& what) : std::logic_error(what) {}
};

// ---------------------------------------------------------------------------
// Euclidean ball bounds on the toppled set.

struct BallBoundsReport {
  int d = 2;
  double r = 0;        // (n / omega_d)^(1/d)
  double c1 = 0;       // (1 - h)^(-1/d)
  double c1p = 0;      // (1/2 - eps - h)^(-1/d)
  double c2_obs = 0;   // smallest c2 with B(c1 r - c2) inside T
  double c2p_obs = 0;  // smallest c2' with T inside B(c1' r + c2')
  long long inner_radius_sq = 0;  // min |x|^2 over sites outside T
  long long outer_radius_sq = 0;  // max |x|^2 over T
};

inline Float50 unit_ball_volume(int d) {
  static const Float50 pi =
      Float50("3.14159265358979323846264338327950288419716939937511");
  switch (d) {
    case 1: return Float50(2);
    case 2: return pi;
    case 3: return pi * 4 / 3;
    case 4: return pi * pi / 2;
  }
  throw std::invalid_argument("unit ball volume: d out of range");
}

inline BallBoundsReport ball_bounds_check(const Region& toppled, int d,
                                          const Rational& n, const Rational& h,
                                          const Rational& eps) {
  if (toppled.empty()) throw NotStabilized("toppled set is empty");
  using boost::multiprecision::pow;
  BallBoundsReport rep;
  rep.d = d;
  Float50 nf(n.num().str());
  nf /= Float50(n.den().str());
  Float50 hf(h.num().str());
  hf /= Float50(h.den().str());
  Float50 ef(eps.num().str());
  ef /= Float50(eps.den().str());
  Float50 inv_d = Float50(1) / d;
  Float50 r = pow(nf / unit_ball_volume(d), inv_d);
  Float50 c1 = pow(1 - hf, -inv_d);
  rep.r = r.convert_to<double>();
  rep.c1 = c1.convert_to<double>();
  Float50 gap = Float50(1) / 2 - ef - hf;
  if (gap <= 0)
    throw std::invalid_argument("outer bound needs 1/2 - eps - h > 0");
  Float50 c1p = pow(gap, -inv_d);
  rep.c1p = c1p.convert_to<double>();

  // Exact integer geometry: largest toppled |x|^2, smallest untoppled |x|^2.
  long long out_sq = 0;
  for (const Site& s : toppled) out_sq = std::max(out_sq, s.euclid_sq());
  rep.outer_radius_sq = out_sq;
  long long in_sq = -1;
  long long span = 1;
  while (span * span <= out_sq) ++span;  // scan box comfortably beyond T
  Site probe = Site::origin(d);
  std::function<void(int)> rec = [&](int axis) {
    if (axis == d) {
      if (!toppled.count(probe)) {
        long long e = probe.euclid_sq();
        if (in_sq < 0 || e < in_sq) in_sq = e;
      }
      return;
    }
    for (long long v = -span; v <= span; ++v) {
      probe.c[axis] = (int32_t)v;
      rec(axis + 1);
    }
  };
  rec(0);
  rep.inner_radius_sq = in_sq;

  Float50 rho_in = sqrt(Float50(in_sq));
  Float50 rho_out = sqrt(Float50(out_sq));
  rep.c2_obs = (c1 * r - rho_in).convert_to<double>();
  rep.c2p_obs = (rho_out - c1p * r).convert_to<double>();
  return rep;
}

// ---------------------------------------------------------------------------
// Odometer diagnostics. The emitted-mass function u satisfies, exactly,
//   Delta u(x) + (n - h) [x = 0] = final_mass(x) - h
// at every site, with the right side in [-h, 1 - h) on the toppled set.

namespace analysis_detail {

inline AffineMass odometer_at(const EvolutionState& st, const Site& x) {
  auto it = st.odometer().find(x);
  return it == st.odometer().end() ? AffineMass::zero() : it->second;
}

inline AffineMass odometer_laplacian(const EvolutionState& st, const Site& x) {
  AffineMass acc;
  for (const Site& nb : neighbors(x)) acc += odometer_at(st, nb);
  return acc * Rational(1, 2LL * st.dim()) - odometer_at(st, x);
}

}  // namespace analysis_detail

inline bool odometer_laplacian_check(EvolutionState& st) {
  if (!st.stable()) throw NotStabilized("odometer identity needs a stable state");
  const AffineMass h_mass = st.config().background();
  const AffineMass n_mass = st.origin_initial();
  Region window = st.toppled();
  for (const Site& s : outer_boundary(st.toppled())) window.insert(s);
  window.insert(Site::origin(st.dim()));
  for (const Site& x : window) {
    AffineMass lhs = analysis_detail::odometer_laplacian(st, x);
    if (x == Site::origin(st.dim())) lhs += n_mass - h_mass;
    AffineMass rhs = st.config().at(x) - h_mass;
    if (lhs != rhs) return false;
    // Final masses are stable: rhs < 1 - h uniformly.
    AffineMass final_mass = st.config().at(x);
    if (!decide_ge_one_over_interval(final_mass, st.interval()).always_false())
      return false;
    if (st.toppled().count(x)) {
      // Sites that split end with nonnegative mass: rhs >= -h.
      if (final_mass.eval(st.interval().lo) < Rational(0)) return false;
      if (final_mass.eval(st.interval().hi) < Rational(0)) return false;
    }
  }
  return true;
}

// Greedy mass-descent path: from a toppled site next to the boundary, step
// to the neighbor that emitted the most (skipping the predecessor). For
// h < 0 the emitted mass strictly increases by more than -2d h/(2d-1) per
// step and the path must reach the origin.
struct PathReport {
  bool reached_origin = false;
  bool increments_ok = true;
  std::vector<Site> path;
};

struct PathStuck : std::logic_error {
  explicit PathStuck(const std::string& what) : std::logic_error(what) {}
};

inline PathReport greedy_increasing_path(const EvolutionState& st,
                                         std::optional<Site> start = {}) {
  const Rational h = st.config().background().eval(st.interval().lo);
  if (!(h < Rational(0)))
    throw PreconditionUnmet("greedy path argument needs h < 0");
  const Rational h_eval = st.interval().lo;
  PathReport rep;
  const Region& t = st.toppled();
  if (t.empty()) {
    rep.reached_origin = true;
    return rep;
  }
  Site x0;
  if (start) {
    x0 = *start;
  } else {
    // Lexicographically smallest toppled site adjacent to the boundary.
    bool found = false;
    for (const Site& s : sorted_sites(t)) {
      for (const Site& nb : neighbors(s))
        if (!t.count(nb)) {
          x0 = s;
          found = true;
          break;
        }
      if (found) break;
    }
    if (!found) throw PathStuck("no toppled site adjacent to the boundary");
  }
  auto u_of = [&](const Site& s) {
    return analysis_detail::odometer_at(st, s).eval(h_eval);
  };
  Rational min_gain = Rational(-2LL * st.dim(), 2LL * st.dim() - 1) * h;
  Site origin = Site::origin(st.dim());
  Site cur = x0;
  std::optional<Site> prev;
  rep.path.push_back(cur);
  size_t cap = t.size() + 1;
  while (cur != origin) {
    if (rep.path.size() > cap)
      throw PathStuck("path exceeded the toppled-set size");
    std::optional<Site> best;
    Rational best_u;
    for (const Site& nb : neighbors(cur)) {
      if (prev && nb == *prev) continue;
      Rational u = u_of(nb);
      if (!best || u > best_u || (u == best_u && nb < *best)) {
        best = nb;
        best_u = u;
      }
    }
    if (!best) throw PathStuck("no admissible neighbor");
    // min_gain = -2d h / (2d-1) is positive for h < 0, so this also forces
    // strict increase (and hence no revisits).
    if (!(best_u > u_of(cur) + min_gain)) rep.increments_ok = false;
    prev = cur;
    cur = *best;
    rep.path.push_back(cur);
  }
  rep.reached_origin = true;
  return rep;
}

// Box-averaged odometer bound: with u_k the average of u over the cube of
// radius k, Delta u_k(x) >= k/(2k+1) - h - (n-h)/(2k+1)^d [0 in Q_k(x)] for
// every x whose cube sits inside T. Exact rational arithmetic.
inline bool box_average_check(const EvolutionState& st, int k) {
  if (k < 1) throw std::invalid_argument("box radius must be >= 1");
  const int d = st.dim();
  const Rational h = st.config().background().eval(st.interval().lo);
  const Rational n = st.origin_initial().eval(st.interval().lo);
  const Rational h_eval = st.interval().lo;
  const Region& t = st.toppled();

  long long cube_size = 1;
  for (int i = 0; i < d; ++i) cube_size *= 2 * k + 1;
  SiteMap<Rational> memo;
  auto u_avg = [&](const Site& x) -> const Rational& {
    auto it = memo.find(x);
    if (it != memo.end()) return it->second;
    Rational total;
    for (const Site& y : cube_region(x, k))
      total += analysis_detail::odometer_at(st, y).eval(h_eval);
    return memo.emplace(x, total / Rational(cube_size)).first->second;
  };
  auto cube_inside = [&](const Site& x) {
    for (const Site& y : cube_region(x, k))
      if (!t.count(y)) return false;
    return true;
  };
  auto origin_in_cube = [&](const Site& x) {
    for (int i = 0; i < d; ++i)
      if (std::abs(x[i]) > k) return false;
    return true;
  };

  for (const Site& x : t) {
    if (!cube_inside(x)) continue;
    Rational lap;
    for (const Site& nb : neighbors(x)) lap += u_avg(nb);
    lap = lap / Rational(2LL * d) - u_avg(x);
    Rational bound = Rational(k, 2 * k + 1) - h;
    if (origin_in_cube(x)) bound -= (n - h) / Rational(cube_size);
    if (lap < bound) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Regimes and parameter scans.

enum class Regime { Robust, Explosive, Unknown };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Robust: return "robust";
    case Regime::Explosive: return "explosive";
    case Regime::Unknown: return "unknown";
  }
  return "?";
}

// What the proven theorems certify for background h in dimension d, without
// simulating. Single-site orders only get the order-independent bounds.
inline Regime certified_regime(const Rational& h, int d,
                               SplittingOrder order = SplittingOrder::parallel()) {
  if (h < Rational(1, 2)) return Regime::Robust;
  if (h >= Rational(1) - Rational(1, 2LL * d)) return Regime::Explosive;
  if (order.kind == OrderKind::Parallel) {
    if (d == 2 && h >= Rational(13, 19)) return Regime::Explosive;
    if (d >= 3 && h >= theory_constants(d).c_prime) return Regime::Explosive;
  }
  return Regime::Unknown;
}

struct ScanRow {
  int d = 0;
  Rational h;
  Rational n;
  SplittingOrder order;
  std::string verdict;           // certified-explosive / stabilized / budget-*
  long long toppled = 0;
  long long steps = 0;
  double growth_rate = 0;        // |T_t| / t at the end of the run
};

struct ScanBudgets {
  long long max_steps = 2000;
  long long max_radius = 400;
};

// Grid points are independent runs, so they execute concurrently; the
// result order is the (h, n) grid order regardless of completion order.
inline std::vector<ScanRow> regime_scan(int d, const std::vector<Rational>& hs,
                                        const std::vector<Rational>& ns,
                                        ScanBudgets budgets = {},
                                        SplittingOrder order = SplittingOrder::parallel()) {
  std::vector<std::pair<Rational, Rational>> grid;
  for (const Rational& h : hs)
    for (const Rational& n : ns) grid.emplace_back(h, n);

  auto run_point = [&](const std::pair<Rational, Rational>& hn) {
    const auto& [h, n] = hn;
    ScanRow row;
    row.d = d;
    row.h = h;
    row.n = n;
    row.order = order;
    auto st = EvolutionState::init(d, AffineMass::constant(n),
                                   HInterval::point(h), order);
    st.set_track_odometer(false);
    RunOutcome out = st.run(budgets.max_steps, budgets.max_radius);
    switch (out.kind) {
      case RunOutcome::Kind::CertifiedExplosive:
        row.verdict = "certified-explosive";
        break;
      case RunOutcome::Kind::Stabilized:
        row.verdict = "stabilized";
        break;
      case RunOutcome::Kind::BudgetExhausted:
        row.verdict = "budget-" + out.exhausted_budget;
        break;
      case RunOutcome::Kind::IntervalSplit:
        row.verdict = "interval-split";
        break;
    }
    row.toppled = (long long)st.toppled().size();
    row.steps = st.t();
    if (st.t() > 0) row.growth_rate = (double)st.toppled().size() / st.t();
    return row;
  };

  std::vector<std::future<ScanRow>> futures;
  futures.reserve(grid.size());
  for (const auto& hn : grid)
    futures.push_back(std::async(std::launch::async | std::launch::deferred,
                                 run_point, hn));
  std::vector<ScanRow> rows;
  rows.reserve(grid.size());
  for (auto& f : futures) rows.push_back(f.get());
  return rows;
}

}  // namespace splitsim

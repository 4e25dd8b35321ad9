#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "splitsim/constants.hpp"
#include "splitsim/lattice.hpp"

namespace splitsim {

enum class OrderKind { Parallel, SingleSiteLexMin, SingleSiteRandom };

// How the set of splitting sites is chosen from the unstable set each step.
// Parallel splits all of them; the single-site orders split exactly one,
// either the lexicographically smallest (the leftmost site in 1D) or one
// picked uniformly by a seeded deterministic generator. The seed is part of
// the run identity.
struct SplittingOrder {
  OrderKind kind = OrderKind::Parallel;
  uint64_t seed = 0;

  static SplittingOrder parallel() { return {OrderKind::Parallel, 0}; }
  static SplittingOrder lex_min() { return {OrderKind::SingleSiteLexMin, 0}; }
  static SplittingOrder random(uint64_t seed) {
    return {OrderKind::SingleSiteRandom, seed};
  }

  std::string str() const {
    switch (kind) {
      case OrderKind::Parallel:
        return "parallel";
      case OrderKind::SingleSiteLexMin:
        return "lexmin";
      case OrderKind::SingleSiteRandom:
        return "random:" + std::to_string(seed);
    }
    return "?";
  }
  static SplittingOrder parse(std::string_view s) {
    if (s == "parallel") return parallel();
    if (s == "lexmin" || s == "leftmost") return lex_min();
    if (s.rfind("random", 0) == 0) {
      uint64_t seed = 0;
      if (s.size() > 7 && (s[6] == ':' || s[6] == '='))
        seed = std::stoull(std::string(s.substr(7)));
      return random(seed);
    }
    throw std::invalid_argument("unknown splitting order: '" + std::string(s) +
                                "'");
  }
};

struct StepStats {
  long long t = 0;
  uint64_t unstable = 0;
  uint64_t toppled = 0;
  std::optional<AffineMass> window_mass;  // total over T and its boundary
};

// Payload returned when an instability test has no uniform answer over the
// h-interval; the run cannot proceed without narrowing the interval at the
// crossing. Surfaced, never auto-bisected, at this level.
struct InstabilityCrossing {
  Rational crossing;
  Site site;
  long long t = 0;
};

enum class StepResult { Advanced, Stable, IntervalSplit };

enum class ExplosionReason {
  // Any order: a finite toppled set would leave a boundary site holding
  // h + 1/(2d) >= 1, which must split. Applies when h >= 1 - 1/(2d), n >= 1.
  BoundaryGain,
  // Parallel, d >= 3: the diagonal front keeps advancing when h >= c_prime(d)
  // and n >= 2d(1-h).
  DiagonalFrontProgression,
  // Parallel, d == 2: corner sites get reinforced two steps in a row when
  // h >= 13/19 and n >= 64 - 84h.
  CornerReinforcement,
};

struct RunOutcome {
  enum class Kind { Stabilized, BudgetExhausted, IntervalSplit, CertifiedExplosive };
  Kind kind = Kind::Stabilized;
  std::optional<InstabilityCrossing> crossing;   // for IntervalSplit
  std::optional<ExplosionReason> reason;         // for CertifiedExplosive
  std::string exhausted_budget;                  // for BudgetExhausted

  bool stabilized() const { return kind == Kind::Stabilized; }
};

// One evolution run: configuration, time, toppled set, odometer and split
// counts, plus the instability decisions cache. All mass arithmetic is
// exact; a run over a non-degenerate h-interval either finishes with every
// instability decision uniform over the interval or stops at the first
// crossing.
class EvolutionState {
 public:
  // Initial configuration: mass n at the origin, background h elsewhere.
  // For a point interval the background value is substituted into all masses
  // up front, so pointwise runs carry plain rationals.
  static EvolutionState init(int d, const AffineMass& n, HInterval h,
                             SplittingOrder order) {
    if (d < 1 || d > kMaxDim)
      throw std::invalid_argument("dimension must be in 1..4");
    if (h.is_point() ? !(h.lo < Rational(1)) : !(h.hi <= Rational(1)))
      throw std::invalid_argument("background must satisfy h < 1");
    if (n.eval(h.lo) < Rational(0) || n.eval(h.hi) < Rational(0))
      throw std::invalid_argument("initial mass must be >= 0 on the interval");
    EvolutionState st;
    st.d_ = d;
    st.n_ = n;
    st.h_ = std::move(h);
    st.order_ = order;
    AffineMass background = st.h_.is_point()
                                ? AffineMass::constant(st.h_.lo)
                                : AffineMass::background_unit();
    st.origin_initial_ =
        st.h_.is_point() ? AffineMass::constant(n.eval(st.h_.lo)) : n;
    st.config_ = SparseConfiguration(d, background);
    st.config_.set(Site::origin(d), st.origin_initial_);
    st.dirty_.push_back(Site::origin(d));
    st.rng_.seed(order.seed);
    return st;
  }

  int dim() const { return d_; }
  long long t() const { return t_; }
  const SparseConfiguration& config() const { return config_; }
  const Region& toppled() const { return toppled_; }
  const SiteMap<AffineMass>& odometer() const { return odometer_; }
  const SiteMap<uint32_t>& split_counts() const { return split_counts_; }
  const std::vector<StepStats>& series() const { return series_; }
  const HInterval& interval() const { return h_; }
  const AffineMass& initial_mass() const { return n_; }
  const AffineMass& origin_initial() const { return origin_initial_; }
  SplittingOrder order() const { return order_; }
  long long toppled_radius_linf() const { return toppled_radius_; }
  bool parity_respected() const { return parity_ok_; }

  void set_track_odometer(bool v) { track_odometer_ = v; }
  void set_record_schedule(bool v) { record_schedule_ = v; }
  void set_track_window_mass(bool v) { track_window_mass_ = v; }
  const std::vector<std::vector<Site>>& schedule() const { return schedule_; }

  size_t unstable_count() {
    if (refresh_decisions())
      throw std::logic_error(
          "instability decision not uniform over the h-interval; step() "
          "reports the crossing");
    return unstable_.size();
  }
  bool stable() { return unstable_count() == 0; }

  // Refreshes instability decisions for sites whose mass changed. Returns a
  // crossing if some decision is not uniform over the h-interval; the state
  // is left unmodified in that case (decisions are pure).
  std::optional<InstabilityCrossing> refresh_decisions() {
    while (!dirty_.empty()) {
      Site s = dirty_.back();
      IntervalDecision dec = decide_ge_one_over_interval(config_.at(s), h_);
      if (dec.is_mixed())
        return InstabilityCrossing{*dec.crossing, s, t_};
      if (dec.always_true())
        unstable_.insert(s);
      else
        unstable_.erase(s);
      dirty_.pop_back();
    }
    return std::nullopt;
  }

  StepResult step() {
    return step_impl(nullptr);
  }
  StepResult step(std::optional<InstabilityCrossing>& crossing_out) {
    return step_impl(&crossing_out);
  }

  RunOutcome run(long long max_steps, long long max_radius,
                 bool use_certificates = true) {
    if (use_certificates) {
      if (auto reason = explosion_certificate()) {
        RunOutcome out;
        out.kind = RunOutcome::Kind::CertifiedExplosive;
        out.reason = reason;
        return out;
      }
    }
    RunOutcome out;
    while (true) {
      std::optional<InstabilityCrossing> crossing;
      StepResult r = step_impl(&crossing);
      if (r == StepResult::Stable) {
        record_stats();
        out.kind = RunOutcome::Kind::Stabilized;
        return out;
      }
      if (r == StepResult::IntervalSplit) {
        out.kind = RunOutcome::Kind::IntervalSplit;
        out.crossing = crossing;
        return out;
      }
      if (t_ >= max_steps) {
        out.kind = RunOutcome::Kind::BudgetExhausted;
        out.exhausted_budget = "max_steps";
        return out;
      }
      if (toppled_radius_ > max_radius) {
        out.kind = RunOutcome::Kind::BudgetExhausted;
        out.exhausted_budget = "max_radius";
        return out;
      }
    }
  }

  // Explosion certificates, valid without simulation.
  std::optional<ExplosionReason> explosion_certificate() const {
    auto nonneg_over = [&](const AffineMass& f) {
      return f.eval(h_.lo) >= Rational(0) && f.eval(h_.hi) >= Rational(0);
    };
    AffineMass h_mass = AffineMass::background_unit();
    if (h_.lo >= Rational(1) - Rational(1, 2LL * d_) &&
        nonneg_over(n_ - AffineMass::constant(Rational(1))))
      return ExplosionReason::BoundaryGain;
    if (order_.kind == OrderKind::Parallel && d_ == 2 &&
        h_.lo >= Rational(13, 19) &&
        nonneg_over(n_ - (AffineMass::constant(Rational(64)) -
                          h_mass * Rational(84))))
      return ExplosionReason::CornerReinforcement;
    if (order_.kind == OrderKind::Parallel && d_ >= 3) {
      TheoryConstants tc = theory_constants(d_);
      AffineMass gap = n_ - (AffineMass::constant(Rational(2LL * d_)) -
                             h_mass * Rational(2LL * d_));
      if (h_.lo >= tc.c_prime && nonneg_over(gap))
        return ExplosionReason::DiagonalFrontProgression;
    }
    return std::nullopt;
  }

  // Mass the current window T u boundary(T) held at time zero.
  AffineMass initial_window_mass() const {
    Region window = toppled_;
    for (const Site& s : outer_boundary(toppled_)) window.insert(s);
    AffineMass total;
    long long background_sites = (long long)window.size();
    if (window.count(Site::origin(d_))) {
      total += origin_initial_;
      --background_sites;
    }
    return total + config_.background() * Rational(background_sites);
  }

 private:
  StepResult step_impl(std::optional<InstabilityCrossing>* crossing_out) {
    if (auto crossing = refresh_decisions()) {
      if (crossing_out) *crossing_out = crossing;
      return StepResult::IntervalSplit;
    }
    if (unstable_.empty()) return StepResult::Stable;
    record_stats();

    splitters_.clear();
    switch (order_.kind) {
      case OrderKind::Parallel:
        splitters_.assign(unstable_.begin(), unstable_.end());
        break;
      case OrderKind::SingleSiteLexMin: {
        const Site* best = nullptr;
        for (const Site& s : unstable_)
          if (!best || s < *best) best = &s;
        splitters_.push_back(*best);
        break;
      }
      case OrderKind::SingleSiteRandom: {
        std::vector<Site> pool(unstable_.begin(), unstable_.end());
        std::sort(pool.begin(), pool.end());
        splitters_.push_back(pool[rng_() % pool.size()]);
        break;
      }
    }

    if (order_.kind == OrderKind::Parallel && parity_ok_) {
      for (const Site& s : splitters_)
        if (parity(s) != (int)(t_ & 1)) {
          parity_ok_ = false;
          break;
        }
    }
    if (record_schedule_) {
      std::vector<Site> sched = splitters_;
      std::sort(sched.begin(), sched.end());
      schedule_.push_back(std::move(sched));
    }

    received_.clear();
    for (const Site& s : splitters_) {
      AffineMass m = config_.at(s);
      AffineMass share = m.split_share(d_);
      for (const Site& nb : neighbors(s)) received_[nb] += share;
      if (track_odometer_) odometer_[s] += m;
      ++split_counts_[s];
      if (toppled_.insert(s).second)
        toppled_radius_ = std::max(toppled_radius_, s.linf_norm());
    }
    for (const Site& s : splitters_) config_.set(s, AffineMass::zero());
    for (auto& [site, delta] : received_)
      config_.add(site, AffineMass(delta));

    dirty_.clear();
    dirty_.reserve(received_.size() + splitters_.size());
    for (const auto& [site, delta] : received_) dirty_.push_back(site);
    for (const Site& s : splitters_)
      if (!received_.count(s)) dirty_.push_back(s);

    ++t_;
    return StepResult::Advanced;
  }

  void record_stats() {
    if (!series_.empty() && series_.back().t == t_) return;
    StepStats st;
    st.t = t_;
    st.unstable = unstable_.size();
    st.toppled = toppled_.size();
    if (track_window_mass_) {
      Region window = toppled_;
      for (const Site& s : outer_boundary(toppled_)) window.insert(s);
      st.window_mass = config_.total_over(window);
    }
    series_.push_back(std::move(st));
  }

  int d_ = 1;
  AffineMass n_;
  AffineMass origin_initial_;
  HInterval h_ = HInterval::point(Rational(0));
  SplittingOrder order_;
  SparseConfiguration config_;
  long long t_ = 0;
  Region toppled_;
  long long toppled_radius_ = 0;
  SiteMap<AffineMass> odometer_;
  SiteMap<uint32_t> split_counts_;
  Region unstable_;
  std::vector<Site> dirty_;
  std::vector<StepStats> series_;
  bool parity_ok_ = true;
  bool track_odometer_ = true;
  bool track_window_mass_ = false;
  bool record_schedule_ = false;
  std::vector<std::vector<Site>> schedule_;
  std::mt19937_64 rng_;
  // scratch, reused across steps
  std::vector<Site> splitters_;
  SiteMap<AffineMass> received_;
};

struct PreconditionUnmet : std::logic_error {
  explicit PreconditionUnmet(const std::string& what)
      : std::logic_error(what) {}
};

// Even sites split only at even times, odd sites at odd times (parallel
// order). Tracked incrementally during the run.
inline bool parity_check(const EvolutionState& state) {
  if (state.order().kind != OrderKind::Parallel)
    throw PreconditionUnmet("parity_check needs the parallel order");
  return state.parity_respected();
}

// |T| <= n / (1/2 - h) for stabilized runs with h < 1/2.
inline bool t_bound_check(const EvolutionState& state, const Rational& h) {
  if (!(h < Rational(1, 2)))
    throw PreconditionUnmet("toppled-set bound needs h < 1/2");
  Rational n = state.origin_initial().eval(h);
  Rational tsize((long long)state.toppled().size());
  return tsize * (Rational(1, 2) - h) <= n;
}

// For h >= 1 - 1/d, a stabilized toppled set is a full axis-aligned box
// (and a cube centered at the origin under the parallel order).
inline bool rectangle_check(const EvolutionState& state, const Rational& h) {
  if (h < Rational(1) - Rational(1, state.dim()))
    throw PreconditionUnmet("rectangle check is vacuous for h < 1 - 1/d");
  const Region& t = state.toppled();
  if (t.empty()) return true;
  int d = state.dim();
  std::array<int64_t, kMaxDim> mn{}, mx{};
  mn.fill(INT64_MAX);
  mx.fill(INT64_MIN);
  for (const Site& s : t)
    for (int i = 0; i < d; ++i) {
      mn[i] = std::min<int64_t>(mn[i], s[i]);
      mx[i] = std::max<int64_t>(mx[i], s[i]);
    }
  unsigned long long volume = 1;
  for (int i = 0; i < d; ++i) volume *= (unsigned long long)(mx[i] - mn[i] + 1);
  if (volume != t.size()) return false;  // T is inside the box, so count decides
  if (state.order().kind == OrderKind::Parallel) {
    for (int i = 0; i < d; ++i)
      if (mn[i] != -mx[i] || (mx[i] - mn[i]) != (mx[0] - mn[0])) return false;
  }
  return true;
}

// No mass enters or leaves T u boundary(T): the window total at time t
// equals the window total at time zero, exactly.
inline bool conservation_check(const EvolutionState& state) {
  Region window = state.toppled();
  for (const Site& s : outer_boundary(state.toppled())) window.insert(s);
  return state.config().total_over(window) == state.initial_window_mass();
}

}  // namespace splitsim

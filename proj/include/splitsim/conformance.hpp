#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "splitsim/ca.hpp"
#include "splitsim/engine.hpp"

namespace splitsim {

// Mass window a label certifies: either a single exact value (closed point)
// or a half-open interval with affine-in-h endpoints; hi == nullopt means
// unbounded above.
struct MassWindow {
  enum class Kind { Point, HalfOpen };
  Kind kind = Kind::Point;
  AffineMass lo;
  std::optional<AffineMass> hi;

  static MassWindow point(AffineMass v) {
    return {Kind::Point, std::move(v), std::nullopt};
  }
  static MassWindow half_open(AffineMass lo, AffineMass hi) {
    return {Kind::HalfOpen, std::move(lo), std::move(hi)};
  }
  static MassWindow at_least(AffineMass lo) {
    return {Kind::HalfOpen, std::move(lo), std::nullopt};
  }

  // Uniform membership of mass x over the h-range I.
  IntervalDecision contains(const AffineMass& x, const HInterval& I) const {
    if (kind == Kind::Point) return affine_equals_over_interval(x, lo, I);
    if (!hi) {
      RationalInterval truth = affine_nonneg_set((x - lo).a, (x - lo).b);
      return detail::decide_against_set(I, truth);
    }
    return affine_in_halfopen_over_interval(x, lo, *hi, I);
  }

  std::string str() const {
    if (kind == Kind::Point) return "{" + lo.str() + "}";
    return "[" + lo.str() + ", " + (hi ? hi->str() : "inf") + ")";
  }
};

// Label -> mass-window table for one automaton, with the h-interval on which
// it certifies the splitting run.
struct LabelMapping {
  std::string name;
  HInterval validity = HInterval::point(Rational(0));
  std::vector<std::optional<MassWindow>> by_label;
  std::map<std::string, MassWindow> class_windows;
  uint32_t unstable_mask = 0;  // labels whose window lies in [1, inf)

  const MassWindow& window(Label l) const {
    if (l >= by_label.size() || !by_label[l])
      throw std::invalid_argument("label has no mass window");
    return *by_label[l];
  }
  const MassWindow& window(const std::string& sym, const AutomatonSpec& spec) const {
    auto it = class_windows.find(sym);
    if (it != class_windows.end()) return it->second;
    return window(spec.label_id(sym));
  }
};

namespace mapping_detail {
inline AffineMass am(long long an, long long ad, long long bn, long long bd) {
  return AffineMass(Rational(an, ad), Rational(bn, bd));
}
}  // namespace mapping_detail

inline LabelMapping diamond_mapping(const AutomatonSpec& spec) {
  using mapping_detail::am;
  LabelMapping m;
  m.name = "diamond";
  m.validity = HInterval::half_open(Rational(1) - Rational(1, 2LL * spec.d),
                                    Rational(1));
  m.by_label.resize(spec.alphabet.size());
  m.by_label[spec.label_id("e")] = MassWindow::point(am(0, 1, 0, 1));
  m.by_label[spec.label_id("h")] = MassWindow::point(am(0, 1, 1, 1));
  m.by_label[spec.label_id("u")] = MassWindow::at_least(am(1, 1, 0, 1));
  m.class_windows["s"] = MassWindow::half_open(am(0, 1, 0, 1), am(1, 1, 0, 1));
  m.unstable_mask = 1u << spec.label_id("u");
  return m;
}

inline LabelMapping square_mapping(const AutomatonSpec& spec) {
  using mapping_detail::am;
  LabelMapping m;
  m.name = "square";
  m.validity = HInterval::half_open(Rational(7, 10), Rational(40, 57));
  m.by_label.resize(spec.alphabet.size());
  auto set = [&](const char* l, MassWindow w) {
    m.by_label[spec.label_id(l)] = std::move(w);
  };
  set("e", MassWindow::point(am(0, 1, 0, 1)));
  set("h", MassWindow::point(am(0, 1, 1, 1)));
  set("p", MassWindow::half_open(am(1, 4, 1, 1), am(1, 1, 0, 1)));
  set("m", MassWindow::half_open(am(1, 1, 0, 1), am(4, 1, -4, 1)));
  set("mp", MassWindow::half_open(am(0, 1, 0, 1), am(12, 1, -15, 1)));
  set("c", MassWindow::half_open(am(0, 1, 0, 1), am(16, 1, -20, 1)));
  set("d", MassWindow::half_open(am(4, 1, -4, 1), am(16, 1, -20, 1)));
  m.class_windows["s"] = MassWindow::half_open(am(0, 1, 0, 1), am(1, 1, 0, 1));
  m.unstable_mask = (1u << spec.label_id("m")) | (1u << spec.label_id("d"));
  return m;
}

inline LabelMapping octagon_mapping(const AutomatonSpec& spec) {
  using mapping_detail::am;
  LabelMapping m;
  m.name = "octagon";
  m.validity = HInterval::half_open(Rational(5, 7), Rational(13, 18));
  m.by_label.resize(spec.alphabet.size());
  auto set = [&](const char* l, MassWindow w) {
    m.by_label[spec.label_id(l)] = std::move(w);
  };
  set("e", MassWindow::point(am(0, 1, 0, 1)));
  set("h", MassWindow::point(am(0, 1, 1, 1)));
  set("p", MassWindow::half_open(am(1, 4, 1, 1), am(1, 1, 0, 1)));
  set("m", MassWindow::half_open(am(1, 1, 0, 1), am(4, 1, -4, 1)));
  set("d", MassWindow::half_open(am(4, 1, -4, 1), am(16, 1, -20, 1)));
  set("dp", MassWindow::half_open(am(3, 8, 5, 4), am(16, 1, -20, 1)));
  set("dx", MassWindow::half_open(am(1, 2, 5, 4), am(16, 1, -20, 1)));
  set("q", MassWindow::half_open(am(1, 1, 1, 1), am(60, 1, -80, 1)));
  set("qp", MassWindow::half_open(am(7, 8, 21, 16), am(60, 1, -80, 1)));
  set("c", MassWindow::half_open(am(1, 1, 0, 1), am(60, 1, -80, 1)));
  set("cp", MassWindow::half_open(am(1, 1, 1, 2), am(60, 1, -80, 1)));
  m.class_windows["s"] = MassWindow::half_open(am(0, 1, 0, 1), am(1, 1, 0, 1));
  m.class_windows["u"] = MassWindow::half_open(am(1, 1, 0, 1), am(60, 1, -80, 1));
  for (const char* l : {"m", "d", "dp", "dx", "q", "qp", "c", "cp"})
    m.unstable_mask |= 1u << spec.label_id(l);
  return m;
}

enum class BuiltinMapping { Diamond, Square, Octagon };

inline LabelMapping builtin_mapping(BuiltinMapping which,
                                    const AutomatonSpec& spec) {
  switch (which) {
    case BuiltinMapping::Diamond:
      return diamond_mapping(spec);
    case BuiltinMapping::Square:
      return square_mapping(spec);
    case BuiltinMapping::Octagon:
      return octagon_mapping(spec);
  }
  throw std::logic_error("unknown mapping");
}

// ---------------------------------------------------------------------------
// Configuration-in-mapping membership.

struct MembershipViolation {
  Site site;
  Label label = 0;
  AffineMass mass;
  std::string window;
};

struct MembershipResult {
  IntervalDecision decision = IntervalDecision::always(true);
  std::optional<MembershipViolation> violation;  // for AlwaysFalse
};

// Does every site's mass lie in the window of its label, uniformly over I?
// Only sites explicit in either structure need testing: background mass h
// sits in the background label's window {h} identically.
inline MembershipResult check_config_in_mapping(const SparseConfiguration& config,
                                                const CAState& labels,
                                                const LabelMapping& mapping,
                                                const AutomatonSpec& spec,
                                                const HInterval& I) {
  Region sites;
  for (const auto& [site, mass] : config.cells()) sites.insert(site);
  for (const auto& [site, lab] : labels.cells) sites.insert(site);

  MembershipResult out;
  const Site* worst = nullptr;
  IntervalDecision worst_dec;
  for (const Site& site : sites) {
    Label l = labels.at(site);
    IntervalDecision dec = mapping.window(l).contains(config.at(site), I);
    if (dec.always_true()) continue;
    bool take = worst == nullptr ||
                (dec.always_false() && !worst_dec.always_false()) ||
                (dec.kind == worst_dec.kind && site < *worst);
    if (take) {
      worst = &site;
      worst_dec = dec;
    }
  }
  if (!worst) return out;
  out.decision = worst_dec;
  if (worst_dec.always_false()) {
    MembershipViolation v;
    v.site = *worst;
    v.label = labels.at(*worst);
    v.mass = config.at(*worst);
    v.window =
        "label '" + spec.label_name(v.label) + "' -> " + mapping.window(v.label).str();
    out.violation = std::move(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lockstep co-simulation of the splitting run against the automaton over an
// h-interval, bisecting at crossings.

struct IntervalVerdict {
  enum class Status { Success, Violation, Inconclusive };
  HInterval interval = HInterval::point(Rational(0));
  Status status = Status::Success;
  long long steps_checked = 0;
  std::string detail;
  std::optional<MembershipViolation> violation;
};

struct ConformanceReport {
  std::string automaton;
  long long t_max = 0;
  long long time_offset = 0;
  int bisections = 0;
  std::vector<IntervalVerdict> verdicts;

  bool success() const {
    for (const auto& v : verdicts)
      if (v.status != IntervalVerdict::Status::Success) return false;
    return !verdicts.empty();
  }
};

struct CosimulateOptions {
  int bisection_budget = 16;
  bool check_ambiguity = false;
};

namespace detail {

inline std::string site_str(const Site& s) {
  std::string out = "(";
  for (int i = 0; i < s.dim(); ++i)
    out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

inline void cosimulate_interval(const AutomatonSpec& spec,
                                const LabelMapping& mapping, int d,
                                const AffineMass& n, const HInterval& I,
                                long long t_max, long long offset,
                                const CosimulateOptions& opts, int& budget,
                                ConformanceReport& report) {
  auto bisect_or_give_up = [&](const Rational& crossing, long long t,
                               const std::string& what) {
    bool can_bisect = !I.is_point() && crossing > I.lo && crossing < I.hi &&
                      budget > 0;
    if (!can_bisect) {
      IntervalVerdict v;
      v.interval = I;
      v.status = IntervalVerdict::Status::Inconclusive;
      v.steps_checked = t;
      v.detail = what + " crossing at h = " + crossing.str() +
                 (budget > 0 ? " (not inside interval)" : " (budget exhausted)");
      report.verdicts.push_back(std::move(v));
      return;
    }
    --budget;
    ++report.bisections;
    cosimulate_interval(spec, mapping, d, n, HInterval::half_open(I.lo, crossing),
                        t_max, offset, opts, budget, report);
    cosimulate_interval(spec, mapping, d, n, HInterval::half_open(crossing, I.hi),
                        t_max, offset, opts, budget, report);
  };

  EvolutionState engine = EvolutionState::init(d, n, I, SplittingOrder::parallel());
  engine.set_track_odometer(false);
  CARunner ca(spec, opts.check_ambiguity);

  // Advance the splitting run so that automaton time 0 pairs with run time
  // `offset`.
  for (long long k = 0; k < offset; ++k) {
    std::optional<InstabilityCrossing> crossing;
    if (engine.step(crossing) == StepResult::IntervalSplit) {
      bisect_or_give_up(crossing->crossing, crossing->t, "instability");
      return;
    }
  }

  for (long long t = 0;; ++t) {
    MembershipResult mem = check_config_in_mapping(engine.config(), ca.state(),
                                                   mapping, spec, I);
    if (mem.decision.is_mixed()) {
      bisect_or_give_up(*mem.decision.crossing, t, "membership");
      return;
    }
    if (mem.decision.always_false()) {
      IntervalVerdict v;
      v.interval = I;
      v.status = IntervalVerdict::Status::Violation;
      v.steps_checked = t;
      v.violation = mem.violation;
      v.detail = "mass outside label window at site " +
                 site_str(mem.violation->site) + ", t = " + std::to_string(t) +
                 ": mass " + mem.violation->mass.str() + " not in " +
                 mem.violation->window;
      report.verdicts.push_back(std::move(v));
      return;
    }

    // The cluster/window identity starts once something has toppled; at
    // offset 0 the automaton seeds its origin one step ahead of the run.
    Region window = engine.toppled();
    for (const Site& s : outer_boundary(engine.toppled())) window.insert(s);
    Region cluster = growth_cluster(ca.state());
    if ((!window.empty() || t + offset > 0) && window != cluster) {
      IntervalVerdict v;
      v.interval = I;
      v.status = IntervalVerdict::Status::Violation;
      v.steps_checked = t;
      v.detail = "growth cluster mismatch at t = " + std::to_string(t) +
                 ": |G| = " + std::to_string(cluster.size()) +
                 ", |T u dT| = " + std::to_string(window.size());
      report.verdicts.push_back(std::move(v));
      return;
    }

    if (t == t_max) break;

    std::optional<InstabilityCrossing> crossing;
    if (engine.step(crossing) == StepResult::IntervalSplit) {
      bisect_or_give_up(crossing->crossing, t, "instability");
      return;
    }
    try {
      ca.step();
    } catch (const NoMatchingRule& e) {
      IntervalVerdict v;
      v.interval = I;
      v.status = IntervalVerdict::Status::Violation;
      v.steps_checked = t;
      v.detail = e.what();
      report.verdicts.push_back(std::move(v));
      return;
    }
  }

  IntervalVerdict v;
  v.interval = I;
  v.status = IntervalVerdict::Status::Success;
  v.steps_checked = t_max;
  report.verdicts.push_back(std::move(v));
}

}  // namespace detail

inline ConformanceReport cosimulate(const AutomatonSpec& spec,
                                    const LabelMapping& mapping, int d,
                                    const AffineMass& n, const HInterval& I,
                                    long long t_max, long long time_offset = 0,
                                    CosimulateOptions opts = {}) {
  ConformanceReport report;
  report.automaton = spec.name;
  report.t_max = t_max;
  report.time_offset = time_offset;
  int budget = opts.bisection_budget;
  detail::cosimulate_interval(spec, mapping, d, n, I, t_max, time_offset, opts,
                              budget, report);
  return report;
}

// ---------------------------------------------------------------------------
// Mechanical verification of one rule's interval arithmetic: Minkowski-sum
// the center window with the splitting neighbors' shares and solve for the
// h-range on which the sum is contained in the result label's window.

struct Contribution {
  Rational coeff;
  MassWindow window;
};

struct ContributionSpec {
  MassWindow center;
  std::vector<Contribution> terms;
};

struct RuleArithmetic {
  AffineMass sum_lo;
  std::optional<AffineMass> sum_hi;  // nullopt: unbounded
  bool sum_is_point = false;
  RationalInterval validity;  // intersected with h < 1
};

inline RuleArithmetic verify_rule_arithmetic(const MassWindow& target,
                                             const ContributionSpec& cs) {
  RuleArithmetic out;
  out.sum_lo = cs.center.lo;
  out.sum_is_point = cs.center.kind == MassWindow::Kind::Point;
  bool unbounded = cs.center.kind == MassWindow::Kind::HalfOpen && !cs.center.hi;
  AffineMass hi_sum = cs.center.kind == MassWindow::Kind::Point
                          ? cs.center.lo
                          : (cs.center.hi ? *cs.center.hi : AffineMass::zero());
  for (const Contribution& c : cs.terms) {
    out.sum_lo += c.window.lo * c.coeff;
    if (c.window.kind == MassWindow::Kind::Point) {
      hi_sum += c.window.lo * c.coeff;
    } else if (!c.window.hi) {
      unbounded = true;
    } else {
      hi_sum += *c.window.hi * c.coeff;
      out.sum_is_point = false;
    }
    if (c.window.kind != MassWindow::Kind::Point) out.sum_is_point = false;
  }
  if (!unbounded) out.sum_hi = hi_sum;

  RationalInterval valid = RationalInterval::all();
  if (target.kind == MassWindow::Kind::Point) {
    // Sum must equal the point value identically.
    if (!out.sum_is_point) {
      valid = RationalInterval::none();
    } else {
      AffineMass f = out.sum_lo - target.lo;
      if (f.a.is_zero() && f.b.is_zero())
        valid = RationalInterval::all();
      else if (f.b.is_zero())
        valid = RationalInterval::none();
      else
        valid = RationalInterval::single(-f.a / f.b);
    }
  } else {
    // target.lo <= sum_lo
    AffineMass lower = out.sum_lo - target.lo;
    valid = valid.intersect(affine_nonneg_set(lower.a, lower.b));
    if (out.sum_is_point) {
      // point value must be strictly under the target's upper endpoint
      if (target.hi) {
        AffineMass upper = *target.hi - out.sum_lo;
        valid = valid.intersect(affine_nonneg_set(upper.a, upper.b, true));
      }
    } else if (target.hi) {
      if (!out.sum_hi) {
        valid = RationalInterval::none();
      } else {
        AffineMass upper = *target.hi - *out.sum_hi;
        valid = valid.intersect(affine_nonneg_set(upper.a, upper.b));
      }
    }
  }
  out.validity = valid.intersect(RationalInterval::at_most(Rational(1), true));
  return out;
}

// Derives the contribution spec of a rule from the mapping: neighbors whose
// window certifies instability contribute their share; windows that start
// at zero cover both the splitting and non-splitting case; stable labels
// contribute nothing. When the center itself certifies instability it
// splits, and by the parity rule none of its neighbors do.
inline ContributionSpec derive_contributions(const AutomatonSpec& spec,
                                             const LabelMapping& mapping,
                                             const Rule& rule) {
  const HInterval& I = mapping.validity;
  auto window_of = [&](const std::string& sym) -> std::optional<MassWindow> {
    if (sym == "*") return std::nullopt;  // any label at all
    return mapping.window(sym, spec);
  };
  auto certainly_unstable = [&](const MassWindow& w) {
    AffineMass f = w.lo - AffineMass::constant(Rational(1));
    return w.kind == MassWindow::Kind::HalfOpen && f.eval(I.lo) >= Rational(0) &&
           f.eval(I.hi) >= Rational(0);
  };
  auto certainly_stable = [&](const MassWindow& w) {
    if (w.kind == MassWindow::Kind::Point)
      return w.lo.eval(I.lo) < Rational(1) && w.lo.eval(I.hi) <= Rational(1);
    if (!w.hi) return false;
    return w.hi->eval(I.lo) <= Rational(1) && w.hi->eval(I.hi) <= Rational(1);
  };

  ContributionSpec cs;
  auto center_window = window_of(rule.center.text);
  if (!center_window)
    throw std::invalid_argument("wildcard centers are not supported");
  if (certainly_unstable(*center_window)) {
    // Center splits; neighbors are held back by parity, so the new mass is 0.
    cs.center = MassWindow::point(AffineMass::zero());
    return cs;
  }
  cs.center = *center_window;
  Rational share(1, 2LL * spec.d);
  for (const PatternSym& sym : rule.nbr) {
    if (sym.text == "*") {
      // Arbitrary neighbor: may stay put or split with any unstable mass.
      cs.terms.push_back({share, MassWindow::at_least(AffineMass::zero())});
      continue;
    }
    MassWindow w = *window_of(sym.text);
    if (certainly_stable(w)) continue;
    if (certainly_unstable(w)) {
      cs.terms.push_back({share, w});
      continue;
    }
    // Straddling window: sound to fold the non-splitting case in only if the
    // window already reaches down to zero.
    if (w.kind == MassWindow::Kind::HalfOpen && w.lo == AffineMass::zero()) {
      cs.terms.push_back({share, w});
      continue;
    }
    throw std::logic_error("cannot classify neighbor window " + w.str());
  }
  return cs;
}

// How each rule's soundness is established.
enum class RuleCheckKind {
  // The derivation displays (or implies) one-step interval arithmetic; the
  // mechanical range must reproduce the printed range exactly.
  Arithmetic,
  // One-step arithmetic applies but the printed claim glosses over window
  // nonemptiness; only coverage of the theorem interval is required.
  Structural,
  // Sound only through a multi-step accumulation argument (a cell that has
  // split is empty and can gather at most 2d quarter-shares before it splits
  // again). One-step arithmetic is vacuous here; the lockstep co-simulation
  // is what checks these labels against real masses.
  MultiStep,
};

// Reference validity ranges as printed in the distributed derivation of each
// ruleset, used to cross-check the mechanical computation. The octagon's
// rule 9 range is inconsistent as printed (empty); the mechanical result is
// reported alongside it as an erratum.
struct RuleValidityEntry {
  size_t rule_index;             // position in AutomatonSpec::rules
  RationalInterval reference;    // as printed
  RuleCheckKind kind = RuleCheckKind::Arithmetic;
  bool reference_suspect = false;
};

inline std::vector<RuleValidityEntry> reference_rule_validity(
    const AutomatonSpec& spec) {
  auto all_h = RationalInterval::at_most(Rational(1), true);
  auto ge = [&](long long n, long long d) {
    return RationalInterval::at_least(Rational(n, d)).intersect(all_h);
  };
  auto le = [&](long long n, long long d) {
    return RationalInterval::at_most(Rational(n, d)).intersect(all_h);
  };
  auto between = [&](long long a, long long b, long long c, long long d) {
    return RationalInterval::at_least(Rational(a, b))
        .intersect(RationalInterval::at_most(Rational(c, d)))
        .intersect(all_h);
  };
  const auto arith = RuleCheckKind::Arithmetic;
  const auto structural = RuleCheckKind::Structural;
  const auto multi = RuleCheckKind::MultiStep;
  std::vector<RuleValidityEntry> out;
  if (spec.name == "diamond") {
    out.push_back({0, all_h, arith});
    out.push_back({1, all_h, arith});
    out.push_back({2, all_h, arith});
    out.push_back({3, ge(2LL * spec.d - 1, 2LL * spec.d), arith});
  } else if (spec.name == "square") {
    out.push_back({0, all_h, arith});   // 1: background keeps its mass
    out.push_back({1, all_h, arith});   // 2: primed cell keeps its mass
    out.push_back({2, all_h, multi});   // 3: core accumulation bound
    out.push_back({3, all_h, arith});   // 4: splitter empties
    out.push_back({4, all_h, structural});  // 5: 0 needs a nonempty window
    out.push_back({5, all_h, multi});   // 6: spent feed, accumulation bound
    out.push_back({6, all_h, arith});   // 7
    out.push_back({7, all_h, arith});   // 8
    out.push_back({8, between(13, 20, 40, 57), arith});  // 9
    out.push_back({9, between(11, 16, 11, 15), arith});  // 10
    out.push_back({10, between(7, 10, 14, 19), arith});  // 11
    out.push_back({11, all_h, arith});  // 12
  } else if (spec.name == "octagon") {
    out.push_back({0, all_h, arith});              // 1
    out.push_back({1, all_h, arith});              // 2
    out.push_back({2, all_h, arith});              // 3
    out.push_back({3, all_h, arith});              // 4
    out.push_back({4, ge(29, 42), arith});         // 5
    out.push_back({5, ge(2, 3), arith});           // 6
    out.push_back({6, ge(5, 7), arith});           // 7
    out.push_back({7, all_h, arith});              // 8
    out.push_back({8, ge(5, 2), arith, true});     // 9: empty as printed
    out.push_back({9, between(1, 2, 11, 15), arith});    // 10
    out.push_back({10, between(1, 2, 8, 11), arith});    // 11
    out.push_back({11, le(13, 18), arith});        // 12
    out.push_back({12, le(21, 29), arith});        // 13
    out.push_back({13, le(13, 18), arith});        // 14
    out.push_back({14, between(28, 41, 26, 35), arith});  // 15
    out.push_back({15, between(2, 3, 37, 50), arith});    // 16
    out.push_back({16, between(2, 3, 26, 35), arith});    // 17
    out.push_back({17, between(26, 41, 26, 35), arith});  // 18
    out.push_back({18, le(14, 19), arith});        // rule 20 (listed 19th)
    out.push_back({19, all_h, arith});             // rule 19 (listed 20th)
    out.push_back({20, all_h, arith});             // p-quiescence (rule 21)
  } else {
    throw std::invalid_argument("no reference validity table for '" +
                                spec.name + "'");
  }
  return out;
}

struct RuleLedgerEntry {
  size_t rule_index;
  std::string rule_text;
  RuleCheckKind kind = RuleCheckKind::Arithmetic;
  RuleArithmetic computed;
  RationalInterval reference;
  bool matches = false;
  bool erratum = false;  // reference itself inconsistent
  bool covers_theorem_interval = false;
};

// Runs the interval arithmetic of every rule of the automaton against its
// mapping and compares with the reference ranges.
inline std::vector<RuleLedgerEntry> rule_arithmetic_ledger(
    const AutomatonSpec& spec, const LabelMapping& mapping) {
  std::vector<RuleLedgerEntry> out;
  for (const RuleValidityEntry& ref : reference_rule_validity(spec)) {
    const Rule& rule = spec.rules[ref.rule_index];
    RuleLedgerEntry entry;
    entry.rule_index = ref.rule_index;
    entry.kind = ref.kind;
    entry.rule_text = rule.center.text + " |";
    for (const PatternSym& p : rule.nbr) entry.rule_text += " " + p.text;
    entry.rule_text += " -> " + spec.label_name(rule.result);
    ContributionSpec cs = derive_contributions(spec, mapping, rule);
    entry.computed = verify_rule_arithmetic(mapping.window(rule.result), cs);
    entry.reference = ref.reference;
    entry.matches = entry.computed.validity == ref.reference;
    entry.erratum = ref.reference_suspect;
    // The computed range must cover every h in [lo, hi): lo must be inside
    // and no upper bound may fall below hi (hi itself is excluded).
    const HInterval& I = mapping.validity;
    const RationalInterval& v = entry.computed.validity;
    entry.covers_theorem_interval =
        !v.empty && v.contains(I.lo) && (!v.hi || v.hi->value >= I.hi);
    out.push_back(std::move(entry));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact mass table the octagon ruleset is anchored to: the configuration
// eight parallel steps after starting with mass 3 at the origin over a
// symbolic background. Quadrant entries are multiples of 1/65536; all other
// sites hold the background mass.
inline SparseConfiguration eight_step_reference_configuration() {
  struct Entry {
    int x, y;
    long long a, b;
  };
  static constexpr Entry kQuadrant[] = {
      {0, 0, 14592, 96512}, {1, 0, 0, 0},     {2, 0, 9423, 99268},
      {3, 0, 0, 0},         {4, 0, 2610, 128408}, {5, 0, 0, 0},
      {6, 0, 111, 88388},
      {0, 1, 0, 0},         {1, 1, 11700, 98608}, {2, 1, 0, 0},
      {3, 1, 4842, 116632}, {4, 1, 0, 0},     {5, 1, 675, 128772},
      {0, 2, 9423, 99268},  {1, 2, 0, 0},     {2, 2, 5814, 102920},
      {3, 2, 0, 0},         {4, 2, 1350, 96824},  {5, 2, 108, 89360},
      {0, 3, 0, 0},         {1, 3, 4842, 116632}, {2, 3, 0, 0},
      {3, 3, 1572, 112880}, {4, 3, 0, 0},     {5, 3, 81, 95692},
      {0, 4, 2610, 128408}, {1, 4, 0, 0},     {2, 4, 1350, 96824},
      {3, 4, 0, 0},         {4, 4, 162, 125848},
      {0, 5, 0, 0},         {1, 5, 675, 128772},  {2, 5, 108, 89360},
      {3, 5, 81, 95692},
      {0, 6, 111, 88388},
  };
  SparseConfiguration config(2, AffineMass::background_unit());
  for (const Entry& e : kQuadrant) {
    AffineMass m(Rational(e.a, 65536), Rational(e.b, 65536));
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        config.set(Site::of({sx * e.x, sy * e.y}), m);
  }
  return config;
}

}  // namespace splitsim

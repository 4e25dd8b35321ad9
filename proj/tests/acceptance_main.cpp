// Acceptance suite: one numbered check per release criterion, each printed
// as a single pass/fail line. Exit status is nonzero if any check fails.

#include <chrono>
#include <iostream>
#include <vector>

#include "property_suites.hpp"
#include "splitsim/splitsim.hpp"

using namespace splitsim;

namespace {

Rational rq(long long n, long long d = 1) { return Rational(n, d); }

int g_failures = 0;

void report(int index, const std::string& name, bool ok,
            const std::string& detail = "") {
  std::cout << "criterion " << index << " (" << name << "): "
            << (ok ? "PASS" : "FAIL");
  if (!detail.empty()) std::cout << " — " << detail;
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

EvolutionState run_pointwise(int d, Rational n, Rational h, long long steps,
                             bool odometer = true) {
  auto st = EvolutionState::init(d, AffineMass::constant(std::move(n)),
                                 HInterval::point(std::move(h)),
                                 SplittingOrder::parallel());
  st.set_track_odometer(odometer);
  st.run(steps, 1000000, /*use_certificates=*/false);
  return st;
}

std::vector<Rational> masses_on_line(const EvolutionState& st, int lo, int hi) {
  std::vector<Rational> out;
  for (int i = lo; i <= hi; ++i)
    out.push_back(st.config().at(Site::of({i})).eval(st.interval().lo));
  return out;
}

Region interval_region(int lo, int hi) {
  Region r;
  for (int i = lo; i <= hi; ++i) r.insert(Site::of({i}));
  return r;
}

// --- criterion 1: golden one-dimensional runs --------------------------------
void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  auto par = run_pointwise(1, rq(4), rq(0), 100);
  bool ok = par.t() == 5 &&
            masses_on_line(par, -3, 3) ==
                std::vector<Rational>{rq(1, 2), rq(3, 4), rq(3, 4), rq(0),
                                      rq(3, 4), rq(3, 4), rq(1, 2)} &&
            par.config().at(Site::of({-4})).eval(rq(0)).is_zero() &&
            par.config().at(Site::of({4})).eval(rq(0)).is_zero();
  auto lex = EvolutionState::init(1, AffineMass::constant(rq(4)),
                                  HInterval::point(rq(0)),
                                  SplittingOrder::lex_min());
  lex.run(1000, 1000, false);
  ok = ok && masses_on_line(lex, -3, 3) ==
                 std::vector<Rational>{rq(1, 2), rq(1, 2), rq(7, 8), rq(3, 4),
                                       rq(0), rq(3, 4), rq(5, 8)};
  double dt = seconds_since(t0);
  report(1, "golden 1D runs", ok && dt < 1.0,
         "t=" + std::to_string(par.t()) + ", " + std::to_string(dt) + " s");
}

// --- criterion 2: non-monotonicity quadruple ---------------------------------
void criterion_2() {
  auto t0 = std::chrono::steady_clock::now();
  auto t_of = [&](Rational n, Rational h) {
    auto st = run_pointwise(1, std::move(n), std::move(h), 100000);
    return st.toppled();
  };
  bool ok = t_of(rq(165, 32), rq(23, 64)) == interval_region(-5, 5) &&
            t_of(rq(167, 32), rq(23, 64)) == interval_region(-4, 4) &&
            t_of(rq(343, 64), rq(21, 64)) == interval_region(-5, 5) &&
            t_of(rq(343, 64), rq(23, 64)) == interval_region(-4, 4);
  double dt = seconds_since(t0);
  report(2, "non-monotonicity quadruple", ok && dt < 1.0,
         std::to_string(dt) + " s");
}

// --- criterion 3: eight-step reference table ---------------------------------
void criterion_3() {
  auto t0 = std::chrono::steady_clock::now();
  auto st = EvolutionState::init(2, AffineMass::constant(rq(3)),
                                 HInterval::half_open(rq(5, 7), rq(13, 18)),
                                 SplittingOrder::parallel());
  bool ok = true;
  for (int i = 0; i < 8; ++i) ok = ok && st.step() == StepResult::Advanced;
  SparseConfiguration expected = eight_step_reference_configuration();
  ok = ok && st.config() == expected;
  double dt = seconds_since(t0);
  report(3, "eight-step mass table", ok && dt < 1.0,
         std::to_string(expected.explicit_count()) + " cells, " +
             std::to_string(dt) + " s");
}

// --- criterion 4: diamond conformance ----------------------------------------
void criterion_4() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (int d : {1, 2, 3}) {
    AutomatonSpec spec = builtin_diamond(d);
    LabelMapping m = diamond_mapping(spec);
    for (long long n : {1, 3, 8}) {
      auto rep = cosimulate(spec, m, d, AffineMass::constant(rq(n)),
                            m.validity, 30);
      if (!rep.success() || rep.bisections != 0) {
        ok = false;
        detail = "d=" + std::to_string(d) + " n=" + std::to_string(n);
      }
    }
    // Growth cluster equals the L1 ball at every step.
    CARunner runner(spec);
    for (int t = 0; t <= 30 && ok; ++t) {
      if (growth_cluster(runner.state()) != diamond_region(d, t)) {
        ok = false;
        detail = "cluster != ball at d=" + std::to_string(d) +
                 " t=" + std::to_string(t);
      }
      runner.step();
    }
  }
  double dt = seconds_since(t0);
  report(4, "diamond conformance", ok && dt < 10.0,
         detail.empty() ? std::to_string(dt) + " s" : detail);
}

// --- criterion 5: square conformance -----------------------------------------
void criterion_5() {
  auto t0 = std::chrono::steady_clock::now();
  AutomatonSpec spec = builtin_square();
  LabelMapping m = square_mapping(spec);
  std::vector<std::pair<int, long long>> schedule;
  for (int r = 1; r <= 20; ++r) schedule.push_back({r, 2 * r});
  auto rec = verify_recurrence(
      spec, [](int r) { return square_period_state(r); }, schedule, true);
  auto rep = cosimulate(spec, m, 2, AffineMass(rq(5), rq(-5)), m.validity, 40);
  bool ok = rec.success && rep.success() && rep.bisections == 0;
  double dt = seconds_since(t0);
  report(5, "square conformance", ok && dt < 30.0,
         std::to_string(dt) + " s");
}

// --- criterion 6: octagon conformance ----------------------------------------
void criterion_6() {
  auto t0 = std::chrono::steady_clock::now();
  AutomatonSpec spec = builtin_octagon();
  LabelMapping m = octagon_mapping(spec);
  std::vector<std::pair<int, long long>> schedule;
  for (int i = 0; i <= 13; ++i) schedule.push_back({i, 5 + 10 * i});
  auto rec = verify_recurrence(
      spec, [](int i) { return octagon_period_state(i); }, schedule, true);
  bool radii_ok = true;
  for (int i = 0; i <= 13; ++i)
    radii_ok =
        radii_ok && cluster_radius_linf(octagon_period_state(i)) == 9 + 6 * i;
  auto rep = cosimulate(spec, m, 2, AffineMass::constant(rq(3)), m.validity,
                        135, /*time_offset=*/8);
  bool ok = rec.success && radii_ok && rep.success() && rep.bisections == 0;
  double dt = seconds_since(t0);
  report(6, "octagon conformance", ok && dt < 120.0,
         std::to_string(dt) + " s");
}

// --- criterion 7: rule-arithmetic ledger --------------------------------------
void criterion_7() {
  bool ok = true;
  std::string detail;
  {
    AutomatonSpec spec = builtin_square();
    auto ledger = rule_arithmetic_ledger(spec, square_mapping(spec));
    auto expect = [&](size_t idx, const RationalInterval& want) {
      if (!(ledger[idx].computed.validity == want)) {
        ok = false;
        detail += "square rule " + std::to_string(idx + 1) + " got " +
                  ledger[idx].computed.validity.str() + "; ";
      }
    };
    auto all_h = RationalInterval::at_most(rq(1), true);
    expect(6, all_h);
    expect(7, all_h);
    expect(8, RationalInterval::at_least(rq(13, 20))
                  .intersect(RationalInterval::at_most(rq(40, 57))));
    expect(9, RationalInterval::at_least(rq(11, 16))
                  .intersect(RationalInterval::at_most(rq(11, 15))));
    expect(10, RationalInterval::at_least(rq(7, 10))
                   .intersect(RationalInterval::at_most(rq(14, 19))));
    expect(11, all_h);
    for (const auto& e : ledger)
      if (e.kind == RuleCheckKind::Arithmetic && !e.matches) {
        ok = false;
        detail += "square rule " + std::to_string(e.rule_index + 1) +
                  " mismatch; ";
      }
  }
  {
    AutomatonSpec spec = builtin_octagon();
    auto ledger = rule_arithmetic_ledger(spec, octagon_mapping(spec));
    int mismatches = 0;
    for (const auto& e : ledger) {
      if (!e.covers_theorem_interval) {
        ok = false;
        detail += "octagon rule index " + std::to_string(e.rule_index) +
                  " does not cover the theorem interval; ";
      }
      if (!e.matches) {
        ++mismatches;
        if (!e.erratum) {
          ok = false;
          detail += "octagon rule index " + std::to_string(e.rule_index) +
                    " unexpected mismatch; ";
        }
      }
    }
    // Exactly the known-bad printed range disagrees, and it is flagged as an
    // erratum with the mechanical range [2/5, 1).
    if (mismatches != 1 || !ledger[8].erratum || !ledger[8].reference.empty ||
        !(ledger[8].computed.validity ==
          RationalInterval::at_least(rq(2, 5))
              .intersect(RationalInterval::at_most(rq(1), true)))) {
      ok = false;
      detail += "octagon rule-9 erratum not reported as expected; ";
    }
  }
  report(7, "rule-arithmetic ledger", ok, detail);
}

// --- criterion 8: theory constants --------------------------------------------
void criterion_8() {
  TheoryConstants c2 = theory_constants(2);
  TheoryConstants c3 = theory_constants(3);
  bool ok = c2.p == rq(1) && c2.q == rq(1, 2) && c2.h_star == rq(7, 10) &&
            c2.h_star == rq(1) - rq(3, 10) && c2.c_prime == rq(7, 10) &&
            c3.h_star == rq(7, 9) && c3.c_prime == rq(7, 9) &&
            c3.c_prime <= rq(11, 14);
  for (int d = 2; d <= 10 && ok; ++d) {
    TheoryConstants c = theory_constants(d);
    Rational cap = rq(1) - rq(3, 4 * d + 2);
    ok = c.c_prime <= cap && ((d == 2) == (c.c_prime == cap)) &&
         c.q + c.p * c.h_star == rq(2 * d) * (rq(1) - c.h_star);
  }
  report(8, "theory constants", ok);
}

// --- criterion 9: randomized property suites ----------------------------------
void criterion_9() {
  auto t0 = std::chrono::steady_clock::now();
  splitsim_tests::SuiteCounts counts =
      splitsim_tests::run_property_suites(0xACCE97ull);
  bool ok = counts.failures.empty() && counts.all_at_least(200);
  std::string detail = "parity " + std::to_string(counts.parity) +
                       ", conservation " + std::to_string(counts.conservation) +
                       ", odometer " + std::to_string(counts.odometer) +
                       ", bound " + std::to_string(counts.t_bound) +
                       ", rectangle " + std::to_string(counts.rectangle) +
                       ", path " + std::to_string(counts.greedy_path) +
                       ", box " + std::to_string(counts.box_k1) + "/" +
                       std::to_string(counts.box_k2) + " cases, " +
                       std::to_string(seconds_since(t0)) + " s";
  if (counts.printed_bound_errata > 0)
    detail += " [erratum: " + std::to_string(counts.printed_bound_errata) +
              " h<0 runs exceed n/(1/2-h) but satisfy (n-h)/(1/2-h)]";
  if (!counts.failures.empty())
    detail = counts.failures.front() + " (+" +
             std::to_string(counts.failures.size() - 1) + " more); " + detail;
  report(9, "randomized property suites", ok, detail);
}

// --- criterion 10: ball bounds at scale ----------------------------------------
void criterion_10() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  std::vector<double> c2s, c2ps;
  for (long long n : {1000LL, 10000LL, 100000LL}) {
    FixedRunResult run = run_fixed_parallel_2d(rq(n), rq(-1), 100000000, 4000);
    if (!run.stabilized) {
      ok = false;
      detail += "n=" + std::to_string(n) + " did not stabilize; ";
      continue;
    }
    BallBoundsReport rep =
        ball_bounds_check(run.toppled, 2, rq(n), rq(-1), rq(1, 20));
    c2s.push_back(rep.c2_obs);
    c2ps.push_back(rep.c2p_obs);
    detail += "n=" + std::to_string(n) + ": c2=" + std::to_string(rep.c2_obs) +
              " c2'=" + std::to_string(rep.c2p_obs) + "; ";
  }
  if (c2s.size() == 3) {
    // Boundedness proxy. The observed optimal constants sit at or below
    // zero here (both ball bounds hold with slack that grows with r), so a
    // raw max/min ratio is meaningless; what must not happen is upward
    // growth. One lattice unit is exhibited as the n-independent constant,
    // and the ratio test runs on positive parts so genuine growth of the
    // needed constant across the three runs still fails the check.
    auto clamp1 = [](std::vector<double> v) {
      for (double& x : v) x = std::max(x, 1.0);
      return v;
    };
    auto ratio = [](const std::vector<double>& v) {
      return *std::max_element(v.begin(), v.end()) /
             *std::min_element(v.begin(), v.end());
    };
    double r1 = ratio(clamp1(c2s));
    double r2 = ratio(clamp1(c2ps));
    bool constant_one_works =
        *std::max_element(c2s.begin(), c2s.end()) <= 1.0 &&
        *std::max_element(c2ps.begin(), c2ps.end()) <= 1.0;
    ok = ok && r1 < 2.0 && r2 < 2.0 && constant_one_works;
    detail += "ratios " + std::to_string(r1) + ", " + std::to_string(r2) +
              (constant_one_works ? " (c2 = 1 works for every n)" : "");
  }
  double dt = seconds_since(t0);
  ok = ok && dt < 300.0;
  report(10, "ball bounds at scale", ok, detail + ", " + std::to_string(dt) + " s");
}

// --- criterion 11: green tables -------------------------------------------------
void criterion_11() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  GreenTable g2 = compute_green(2, 80, 1e-8);
  if (!(g2.residual_max <= 1e-8)) ok = false;
  if (g2.at(Site::of({0, 0})) != 0.0) ok = false;
  double ge1 = g2.at(Site::of({1, 0}));
  if (std::fabs(ge1 + 1.0) > 1e-4) {
    ok = false;
    detail += "g(e1)=" + std::to_string(ge1) + "; ";
  }
  GreenTable g3 = compute_green(3, 28, 1e-8);
  double returns = g3.origin_returns();
  double mc = expected_returns_mc(3, 200000, 128, 0x9E3779B9ull);
  if (std::fabs(returns - mc) > 1e-2) ok = false;
  detail += "returns table " + std::to_string(returns) + " vs walk " +
            std::to_string(mc);
  report(11, "green tables", ok, detail + ", " +
                                     std::to_string(seconds_since(t0)) + " s");
}

// --- criterion 12: shape checks on simulation output ----------------------------
void criterion_12() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;

  auto check = [&](const char* name, int steps, Rational n, Rational h,
                   Rational scale, const Polygon& target, Rational eps) {
    auto st = EvolutionState::init(2, AffineMass::constant(std::move(n)),
                                   HInterval::point(std::move(h)),
                                   SplittingOrder::parallel());
    st.set_track_odometer(false);
    for (int i = 0; i < steps; ++i)
      if (st.step() != StepResult::Advanced) break;
    ShapeVerdict v = shape_check(st.toppled(), scale, target, eps);
    if (!v.inner_ok || !v.outer_ok) {
      ok = false;
      detail += std::string(name) + (v.inner_ok ? "" : " inner") +
                (v.outer_ok ? "" : " outer") + " failed; ";
    }
  };
  check("diamond", 50, rq(3), rq(3, 4), rq(1, 50), diamond_polygon(), rq(1, 10));
  check("square", 50, rq(3, 2), rq(359, 512), rq(1, 25), square_polygon(),
        rq(12, 100));
  check("octagon", 135, rq(3), rq(23, 32), rq(5, 405), octagon_polygon(),
        rq(1, 10));
  double dt = seconds_since(t0);
  report(12, "limiting-shape checks", ok, detail + std::to_string(dt) + " s");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                : std::to_string(g_failures) + " CRITERIA FAILED")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}

// Randomized invariant suites shared by the unit tests and the acceptance
// runner. Each suite runs on at least 200 independent random configurations;
// a failure records which property broke and on what parameters.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "splitsim/analysis.hpp"

namespace splitsim_tests {

using namespace splitsim;

struct SuiteCounts {
  int parity = 0;
  int conservation = 0;
  int odometer = 0;
  int t_bound = 0;
  int rectangle = 0;
  int greedy_path = 0;
  int box_k1 = 0;
  int box_k2 = 0;
  // Runs with h < 0 where |T| exceeds n/(1/2 - h) while satisfying the
  // conservation-derived bound (n - h)/(1/2 - h). The shorter printed form
  // charges the origin a background mass it never had; these are collected
  // as errata, not failures.
  int printed_bound_errata = 0;
  std::vector<std::string> failures;

  bool all_at_least(int m) const {
    return parity >= m && conservation >= m && odometer >= m && t_bound >= m &&
           rectangle >= m && greedy_path >= m && box_k1 >= m && box_k2 >= m;
  }
};

inline SuiteCounts run_property_suites(uint64_t seed) {
  SuiteCounts counts;
  std::mt19937_64 rng(seed);
  auto rnd = [&](long long lo, long long hi) {
    return lo + (long long)(rng() % (uint64_t)(hi - lo + 1));
  };
  auto fail = [&](const std::string& what, int d, const Rational& n,
                  const Rational& h) {
    counts.failures.push_back(what + " (d=" + std::to_string(d) +
                              ", n=" + n.str() + ", h=" + h.str() + ")");
  };

  auto run_case = [&](int d, Rational n, Rational h, bool negative_h) {
    auto st = EvolutionState::init(d, AffineMass::constant(n),
                                   HInterval::point(h),
                                   SplittingOrder::parallel());
    // Conservation after every step, exactly.
    bool conserved = true;
    while (true) {
      StepResult r = st.step();
      if (r != StepResult::Advanced) break;
      if (!conservation_check(st)) conserved = false;
      if (st.t() > 100000) {
        fail("run did not stabilize in budget", d, n, h);
        return;
      }
    }
    ++counts.conservation;
    if (!conserved) fail("mass conservation", d, n, h);

    ++counts.parity;
    if (!parity_check(st)) fail("split-time parity", d, n, h);

    ++counts.odometer;
    if (!odometer_laplacian_check(st)) fail("odometer identity", d, n, h);

    ++counts.t_bound;
    bool printed_bound = t_bound_check(st, h);
    if (h >= Rational(0)) {
      if (!printed_bound) fail("toppled-set bound", d, n, h);
    } else {
      Rational tsize((long long)st.toppled().size());
      bool derived_bound = tsize * (Rational(1, 2) - h) <= n - h;
      if (!derived_bound) fail("toppled-set bound (conservation form)", d, n, h);
      if (!printed_bound) ++counts.printed_bound_errata;
    }

    if (h >= Rational(1) - Rational(1, d)) {
      ++counts.rectangle;
      if (!rectangle_check(st, h)) fail("rectangle shape", d, n, h);
    }

    if (negative_h) {
      ++counts.greedy_path;
      try {
        PathReport rep = greedy_increasing_path(st);
        if (!rep.reached_origin || !rep.increments_ok)
          fail("greedy increasing path", d, n, h);
      } catch (const std::exception& e) {
        fail(std::string("greedy path: ") + e.what(), d, n, h);
      }
      ++counts.box_k1;
      if (!box_average_check(st, 1)) fail("box average k=1", d, n, h);
      ++counts.box_k2;
      if (!box_average_check(st, 2)) fail("box average k=2", d, n, h);
    }
  };

  // Negative backgrounds: robust, and in scope for the h < 0 lemmas.
  for (int i = 0; i < 200; ++i) {
    int d = 1 + (int)(rng() % 2);
    Rational h(-rnd(1, 40), rnd(20, 40));  // h in [-2, -1/40]
    Rational n(rnd(1, 400), rnd(4, 10));   // up to 100
    run_case(d, n, h, /*negative_h=*/true);
  }
  // Nonnegative robust backgrounds; in 1D every h >= 0 also exercises the
  // rectangle property. Sizes keep the toppled-set bound n/(1/2 - h) in the
  // low hundreds so the per-step conservation check stays cheap.
  for (int i = 0; i < 280; ++i) {
    int d = i % 4 == 0 ? 2 : 1;
    Rational h(rnd(0, 22), 50);  // h in [0, 11/25]
    Rational n(rnd(1, 144), rnd(8, 16));  // up to 18
    run_case(d, n, h, /*negative_h=*/false);
  }
  // A few d=2 runs at h >= 1/2 with tiny n: when they stabilize inside the
  // budget, the toppled set must be a cube.
  for (int i = 0; i < 40; ++i) {
    Rational h(rnd(50, 60), 100);
    Rational n(rnd(1, 9), 2);
    auto st = EvolutionState::init(2, AffineMass::constant(n),
                                   HInterval::point(h),
                                   SplittingOrder::parallel());
    RunOutcome out = st.run(400, 200, /*use_certificates=*/false);
    if (out.stabilized()) {
      ++counts.rectangle;
      if (!rectangle_check(st, h)) fail("cube shape", 2, n, h);
    }
  }
  return counts;
}

}  // namespace splitsim_tests

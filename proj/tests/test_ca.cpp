#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "splitsim/ca.hpp"

using namespace splitsim;

namespace {

// Expected diamond state at time t: alternating u/e filling the L1 ball of
// radius t, u where the coordinate sum matches t's parity.
CAState diamond_expected(const AutomatonSpec& spec, long long t) {
  CAState out;
  out.d = spec.d;
  out.t = t;
  out.background = spec.background;
  Label u = spec.label_id("u"), e = spec.label_id("e");
  for (const Site& s : diamond_region(spec.d, t))
    out.set(s, ((s.coord_sum() - t) % 2 + 2) % 2 == 0 ? u : e);
  return out;
}

}  // namespace

TEST_CASE("multiset matching is permutation invariant") {
  AutomatonSpec spec = builtin_octagon();
  CARunner runner(spec);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    Label nbrs[4];
    for (auto& l : nbrs) l = (Label)(rng() % spec.alphabet.size());
    Label center = (Label)(rng() % spec.alphabet.size());
    auto result_of = [&](Label* arr) -> int {
      try {
        return runner.apply_rules(Site::of({0, 0}), center, arr, 4);
      } catch (const NoMatchingRule&) {
        return -1;
      }
    };
    int base = result_of(nbrs);
    for (int p = 0; p < 8; ++p) {
      std::shuffle(nbrs, nbrs + 4, rng);
      CHECK(result_of(nbrs) == base);
    }
  }
}

TEST_CASE("first diamond step: origin empties, neighbors ignite") {
  for (int d : {1, 2, 3}) {
    AutomatonSpec spec = builtin_diamond(d);
    CAState s1 = ca_step(spec, spec.initial);
    CHECK(s1.at(Site::origin(d)) == spec.label_id("e"));
    for (const Site& nb : neighbors(Site::origin(d)))
      CHECK(s1.at(nb) == spec.label_id("u"));
    CHECK(growth_cluster(s1).size() == 2 * (size_t)d + 1);
  }
}

TEST_CASE("all-background state stays put") {
  AutomatonSpec spec = builtin_diamond(2);
  CAState blank;
  blank.d = 2;
  blank.background = spec.background;
  CAState next = ca_step(spec, blank);
  CHECK(next.cells.empty());
}

TEST_CASE("diamond recurrence and growth cluster") {
  for (int d : {1, 2, 3}) {
    AutomatonSpec spec = builtin_diamond(d);
    std::vector<std::pair<int, long long>> schedule;
    int horizon = d == 3 ? 20 : 30;
    for (int t = 0; t <= horizon; ++t) schedule.push_back({t, t});
    auto report = verify_recurrence(
        spec, [&](int i) { return diamond_expected(spec, i); }, schedule,
        /*check_ambiguity=*/true);
    INFO("d = " << d);
    CHECK(report.success);
    CHECK(report.checked == horizon + 1);
  }

  // G_{t+1} adds exactly the next diamond layer.
  AutomatonSpec spec = builtin_diamond(2);
  CARunner runner(spec);
  size_t prev = growth_cluster(runner.state()).size();
  for (int t = 1; t <= 12; ++t) {
    runner.step();
    size_t cur = growth_cluster(runner.state()).size();
    CHECK(cur - prev ==
          diamond_region(2, t).size() - diamond_region(2, t - 1).size());
    prev = cur;
  }
}

TEST_CASE("first square step: origin hardens, neighbors become m") {
  AutomatonSpec spec = builtin_square();
  CAState s1 = ca_step(spec, spec.initial);
  CHECK(s1.at(Site::of({0, 0})) == spec.label_id("c"));
  for (const Site& nb : neighbors(Site::of({0, 0})))
    CHECK(s1.at(nb) == spec.label_id("m"));
}

TEST_CASE("square recurrence: even times repeat the ring pattern") {
  AutomatonSpec spec = builtin_square();
  CHECK(square_period_state(0).labels_equal(spec.initial));
  std::vector<std::pair<int, long long>> schedule;
  for (int r = 1; r <= 20; ++r) schedule.push_back({r, 2 * r});
  auto report = verify_recurrence(
      spec, [](int r) { return square_period_state(r); }, schedule,
      /*check_ambiguity=*/true);
  if (report.first_mismatch) {
    INFO("mismatch at stage "
         << report.first_mismatch->index << " site ("
         << report.first_mismatch->site[0] << "," << report.first_mismatch->site[1]
         << ") expected " << spec.label_name(report.first_mismatch->expected)
         << " got " << spec.label_name(report.first_mismatch->actual));
  }
  CHECK(report.success);

  // Growth cluster stays wedged between consecutive squares.
  CARunner runner(spec);
  for (int t = 1; t <= 40; ++t) {
    runner.step();
    long long r = cluster_radius_linf(runner.state());
    CHECK(r >= t / 2);
    CHECK(r <= t / 2 + 1);
    for (const auto& [site, lab] : runner.state().cells)
      CHECK(site.linf_norm() <= t / 2 + 1);
  }
}

TEST_CASE("octagon recurrence: ten-step period, radius 9 + 6i") {
  AutomatonSpec spec = builtin_octagon();
  std::vector<std::pair<int, long long>> schedule;
  for (int i = 0; i <= 13; ++i) schedule.push_back({i, 5 + 10 * i});
  auto report = verify_recurrence(
      spec, [](int i) { return octagon_period_state(i); }, schedule,
      /*check_ambiguity=*/true);
  if (report.first_mismatch) {
    INFO("mismatch at stage "
         << report.first_mismatch->index << " t = " << report.first_mismatch->t
         << " site (" << report.first_mismatch->site[0] << ","
         << report.first_mismatch->site[1] << ") expected "
         << spec.label_name(report.first_mismatch->expected) << " got "
         << spec.label_name(report.first_mismatch->actual));
  }
  CHECK(report.success);

  for (int i : {0, 3, 7, 13})
    CHECK(cluster_radius_linf(octagon_period_state(i)) == 9 + 6 * i);
}

TEST_CASE("octagon labels depend only on the 10-step neighborhood") {
  AutomatonSpec spec = builtin_octagon();
  CAState base = octagon_period_state(1);
  Site probe = Site::of({0, 15});  // tip of the cluster

  CAState advanced = base;
  for (int k = 0; k < 10; ++k) advanced = ca_step(spec, advanced);

  // Perturb cells outside probe + D_10 (and outside the reach of the front,
  // so the rule table stays within the neighborhoods it is defined for).
  for (int j : {0, 1, 2, 3}) {
    CAState perturbed = base;
    Site far = Site::of({j, 28});
    REQUIRE(std::abs(probe[0] - far[0]) + std::abs(probe[1] - far[1]) > 10);
    perturbed.set(far, spec.label_id("p"));
    for (int k = 0; k < 10; ++k) perturbed = ca_step(spec, perturbed);
    CHECK(perturbed.at(probe) == advanced.at(probe));
    CHECK(perturbed.at(probe.offset(1, -1)) == advanced.at(probe.offset(1, -1)));
  }
}

TEST_CASE("missing rules are findings, not silent defaults") {
  AutomatonSpec spec = builtin_square();
  CAState bad;
  bad.d = 2;
  bad.background = spec.background;
  // A heavy-front cell fully ringed by primed cells never occurs in a real
  // run; the rule list has no entry for its neighbors.
  bad.set(Site::of({0, 0}), spec.label_id("d"));
  bad.set(Site::of({0, 1}), spec.label_id("p"));
  bad.set(Site::of({1, 0}), spec.label_id("p"));
  bad.set(Site::of({0, -1}), spec.label_id("p"));
  bad.set(Site::of({-1, 0}), spec.label_id("p"));
  CHECK_THROWS_AS(ca_step(spec, bad), NoMatchingRule);
}

TEST_CASE("rule files round-trip the built-ins") {
  for (const AutomatonSpec& spec :
       {builtin_diamond(2), builtin_square(), builtin_octagon()}) {
    std::string text = serialize_spec(spec);
    AutomatonSpec back = parse_spec(text);
    CHECK(back.name == spec.name);
    CHECK(back.d == spec.d);
    CHECK(back.alphabet == spec.alphabet);
    CHECK(back.background == spec.background);
    REQUIRE(back.rules.size() == spec.rules.size());
    for (size_t i = 0; i < spec.rules.size(); ++i) {
      CHECK(back.rules[i].center.mask == spec.rules[i].center.mask);
      CHECK(back.rules[i].result == spec.rules[i].result);
      REQUIRE(back.rules[i].nbr.size() == spec.rules[i].nbr.size());
      for (size_t j = 0; j < spec.rules[i].nbr.size(); ++j)
        CHECK(back.rules[i].nbr[j].mask == spec.rules[i].nbr[j].mask);
    }
    CHECK(back.priority_overrides == spec.priority_overrides);
    CHECK(back.initial.labels_equal(spec.initial));
    CHECK(serialize_spec(back) == text);
  }
  // A ruleset whose background is not quiescent is rejected.
  CHECK_THROWS(parse_spec(std::string(
      "automaton bad\ndim 1\nalphabet a b\ndefault a\n"
      "rule a | a a -> b\nrule b | * * -> b\ninitial\nend\n")));
}

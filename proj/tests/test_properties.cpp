#include <catch2/catch_amalgamated.hpp>

#include "property_suites.hpp"

using namespace splitsim_tests;

TEST_CASE("randomized invariant suites") {
  SuiteCounts counts = run_property_suites(0xC0FFEEull);
  for (const std::string& f : counts.failures) {
    INFO(f);
    CHECK(false);
  }
  CHECK(counts.failures.empty());
  CHECK(counts.parity >= 200);
  CHECK(counts.conservation >= 200);
  CHECK(counts.odometer >= 200);
  CHECK(counts.t_bound >= 200);
  CHECK(counts.rectangle >= 200);
  CHECK(counts.greedy_path >= 200);
  CHECK(counts.box_k1 >= 200);
  CHECK(counts.box_k2 >= 200);
}

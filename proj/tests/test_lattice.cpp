#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "splitsim/lattice.hpp"

using namespace splitsim;

TEST_CASE("neighbor order is axis-ascending, minus before plus") {
  auto n1 = neighbors(Site::of({0}));
  REQUIRE(n1.count == 2);
  CHECK(n1.sites[0] == Site::of({-1}));
  CHECK(n1.sites[1] == Site::of({1}));

  auto n2 = neighbors(Site::of({0, 0}));
  REQUIRE(n2.count == 4);
  CHECK(n2.sites[0] == Site::of({-1, 0}));
  CHECK(n2.sites[1] == Site::of({1, 0}));
  CHECK(n2.sites[2] == Site::of({0, -1}));
  CHECK(n2.sites[3] == Site::of({0, 1}));

  auto n3 = neighbors(Site::of({1, 1, 1}));
  REQUIRE(n3.count == 6);
  for (const Site& s : n3) {
    long long dist = 0;
    for (int i = 0; i < 3; ++i) dist += std::abs(s[i] - 1);
    CHECK(dist == 1);
  }
}

TEST_CASE("outer boundary") {
  Region single{Site::of({0, 0})};
  Region b = outer_boundary(single);
  CHECK(b.size() == 4);
  CHECK(b.count(Site::of({0, 1})) == 1);

  Region interval;
  for (int i = -2; i <= 2; ++i) interval.insert(Site::of({i}));
  Region bi = outer_boundary(interval);
  CHECK(bi == Region{Site::of({-3}), Site::of({3})});

  CHECK(outer_boundary(Region{}).empty());
}

TEST_CASE("diamond and cube regions") {
  CHECK(diamond_region(2, 1).size() == 5);
  CHECK(diamond_region(2, 2).size() == 13);
  Region d1 = diamond_region(1, 3);
  CHECK(d1.size() == 7);
  for (int i = -3; i <= 3; ++i) CHECK(d1.count(Site::of({i})) == 1);

  CHECK(cube_region(Site::of({0, 0}), 1).size() == 9);
  CHECK(cube_region(Site::of({1, 1, 1}), 1).size() == 27);
  CHECK(cube_region(Site::of({5, -2}), 0) == Region{Site::of({5, -2})});
}

TEST_CASE("diamond layer recurrence") {
  for (int d = 1; d <= 3; ++d) {
    for (int r = 1; r <= 6; ++r) {
      size_t layer = 0;
      for (const Site& s : diamond_region(d, r))
        if (s.l1_norm() == r) ++layer;
      CHECK(diamond_region(d, r).size() ==
            diamond_region(d, r - 1).size() + layer);
    }
  }
}

TEST_CASE("diagonal front sets") {
  Region g11 = diagonal_front(3, 1, 1);
  CHECK(g11 == Region{Site::of({1, 1, 2}), Site::of({1, 2, 1}),
                      Site::of({2, 1, 1})});
  CHECK(diagonal_front(3, 1, 2) == Region{Site::of({1, 2, 2}),
                                          Site::of({2, 1, 2}),
                                          Site::of({2, 2, 1})});
  CHECK(diagonal_front(3, 1, 3) == Region{Site::of({2, 2, 2})});
  CHECK(diagonal_front(2, 4, 0) == Region{Site::of({4, 4})});

  // Full sweep always ends at the next diagonal site.
  for (int d = 1; d <= 4; ++d)
    for (int k = 0; k <= 5; ++k) {
      Site next = Site::origin(d);
      for (int i = 0; i < d; ++i) next.c[i] = k + 1;
      CHECK(diagonal_front(d, k, d) == Region{next});
    }
}

TEST_CASE("parity") {
  CHECK(parity(Site::of({0, 0})) == 0);
  CHECK(parity(Site::of({1, 0})) == 1);
  CHECK(parity(Site::of({1, 1, 1})) == 1);
  CHECK(parity(Site::of({-1, 0})) == 1);
  CHECK(parity(Site::of({-1, -1})) == 0);
}

TEST_CASE("boundary is disjoint from its region") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coord(-6, 6);
  for (int trial = 0; trial < 50; ++trial) {
    int d = 1 + (int)(rng() % 3);
    Region x;
    for (int i = 0; i < 12; ++i) {
      Site s = Site::origin(d);
      for (int j = 0; j < d; ++j) s.c[j] = coord(rng);
      x.insert(s);
    }
    for (const Site& s : outer_boundary(x)) CHECK(x.count(s) == 0);
  }
}

TEST_CASE("sparse configuration stays canonical") {
  SparseConfiguration cfg(2, AffineMass::background_unit());
  Site s = Site::of({3, -1});
  CHECK(cfg.at(s) == AffineMass::background_unit());
  cfg.set(s, AffineMass(Rational(2), Rational(0)));
  CHECK(cfg.explicit_count() == 1);
  cfg.set(s, AffineMass::background_unit());
  CHECK(cfg.explicit_count() == 0);
  cfg.add(s, AffineMass(Rational(1), Rational(0)));
  CHECK(cfg.at(s) == AffineMass(Rational(1), Rational(1)));
  cfg.add(s, AffineMass(Rational(-1), Rational(0)));
  CHECK(cfg.explicit_count() == 0);
  CHECK(cfg.total_over(diamond_region(2, 1)) ==
        AffineMass(Rational(0), Rational(5)));
}

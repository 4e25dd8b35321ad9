// Growing the initial pile can shrink the toppled set: two nearby (n, h)
// pairs whose runs topple 11 vs 9 sites. Exact arithmetic is what makes the
// comparison trustworthy; with doubles the boundary cases round away.

#include <iostream>

#include "splitsim/engine.hpp"

using namespace splitsim;

static void report(Rational n, Rational h) {
  auto st = EvolutionState::init(1, AffineMass::constant(n),
                                 HInterval::point(h),
                                 SplittingOrder::parallel());
  auto out = st.run(100000, 100000);
  std::cout << "n = " << n.str() << ", h = " << h.str() << ": ";
  if (!out.stabilized()) {
    std::cout << "did not stabilize\n";
    return;
  }
  auto sites = sorted_sites(st.toppled());
  std::cout << "|T| = " << sites.size() << ", T = [" << sites.front()[0]
            << ".." << sites.back()[0] << "], stabilized at t = " << st.t()
            << "\n";
}

int main() {
  report(Rational(165, 32), Rational(23, 64));
  report(Rational(167, 32), Rational(23, 64));  // more mass, smaller T
  report(Rational(343, 64), Rational(21, 64));
  report(Rational(343, 64), Rational(23, 64));  // higher background, smaller T
  return 0;
}

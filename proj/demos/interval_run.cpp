// One symbolic run certifies a whole interval of backgrounds: every mass is
// kept as a + b*h and every instability test is decided uniformly over
// h in [3/4, 1). A crossing would be reported, not guessed.

#include <iostream>

#include "splitsim/engine.hpp"

using namespace splitsim;

int main() {
  auto st = EvolutionState::init(2, AffineMass::constant(Rational(3)),
                                 HInterval::half_open(Rational(3, 4), Rational(1)),
                                 SplittingOrder::parallel());
  for (int i = 0; i < 10; ++i) {
    std::optional<InstabilityCrossing> crossing;
    if (st.step(crossing) != StepResult::Advanced) {
      std::cout << "stopped at t = " << st.t();
      if (crossing)
        std::cout << " (instability crossing at h = " << crossing->crossing.str()
                  << ")";
      std::cout << "\n";
      return 1;
    }
  }
  std::cout << "after t = " << st.t() << " steps, uniformly over h in "
            << st.interval().str() << ":\n";
  std::cout << "  toppled sites: " << st.toppled().size() << "\n";
  std::cout << "  origin mass:   " << st.config().at(Site::origin(2)).str()
            << "\n";
  std::cout << "  emitted there: "
            << st.odometer().at(Site::origin(2)).str() << "\n";
  return 0;
}

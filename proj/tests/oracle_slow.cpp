#include <doctest.h>

#include "wqed/oracle.hpp"

using namespace wqed;
using namespace wqed::oracle;

// Largest supported ensemble; takes tens of minutes on one core.
TEST_CASE("steady-state invariants at the capacity limit") {
  const EnsembleParams p{0.05, kMaxAtoms, 1.0, 0.02};
  const auto L = build_liouvillian(p);
  CHECK(L.trace_preservation_residual() < 1e-12);
  const auto ss = steady_state(L);
  CHECK(ss.hermiticity_error() < 1e-12);
  CHECK(ss.trace_error() < 1e-12);
  CHECK(ss.min_eigenvalue() >= -1e-10);
  CHECK(ss.residual <= 1e-10);
}

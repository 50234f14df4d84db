#include <doctest.h>

#include <cmath>

#include "wqed/wavefield.hpp"

using namespace wqed;

namespace {

const EnsembleParams kBase{0.05, 4, 1.0, 0.02};

const Wavefield& base() {
  static const Wavefield w(kBase);
  return w;
}

}  // namespace

TEST_CASE("no atoms means no connected amplitudes") {
  EnsembleParams p = kBase;
  p.num_atoms = 0;
  const Wavefield w(p);
  CHECK(w.phi2(0.3, 0.0) == 0.0);
  CHECK(w.phi3(0.1, 0.4, -0.2) == 0.0);
  CHECK(w.psi3(0.1, 0.4, -0.2) == 1.0);
  CHECK(w.psi2(1.0, 0.0) == 1.0);
}

TEST_CASE("gaussian null forces both amplitudes to zero") {
  const Wavefield w(kBase, GaussianNull{});
  CHECK(w.gaussian_null());
  for (double x : {0.0, 0.5, 3.0}) {
    CHECK(w.phi2(x, 0.0) == 0.0);
    CHECK(w.phi3(x, 0.2, 0.0) == 0.0);
  }
}

TEST_CASE("phi2 exchange symmetry and translation invariance") {
  const auto& w = base();
  for (double a : {0.0, 0.37, 1.9, 7.3})
    for (double b : {0.0, -0.8, 2.2}) {
      CHECK(w.phi2(a, b) == w.phi2(b, a));
      for (double s : {-3.1, 0.5, 12.0}) CHECK(std::abs(w.phi2(a + s, b + s) - w.phi2(a, b)) < 1e-10);
    }
  CHECK(std::abs(w.phi2(0.0, 0.0)) > 0);
}

TEST_CASE("phi2 table interpolation agrees with the direct transform") {
  const auto& w = base();
  const double peak = std::abs(w.phi2_direct(0.0));
  for (double x : {0.0, 0.013, 0.505, 2.777, 9.99, 25.0, 45.0})
    CHECK(std::abs(w.phi2(x, 0.0) - w.phi2_direct(x)) < 1e-8 * peak);
}

TEST_CASE("phi2 self-convergence") {
  WavefieldOptions fine;
  fine.phi2_nodes *= 2;
  const Wavefield w2(kBase, fine);
  const auto& w = base();
  const double peak = std::abs(w2.phi2_direct(0.0));
  for (double x : {0.0, 0.7, 3.0, 10.0}) CHECK(std::abs(w.phi2_direct(x) - w2.phi2_direct(x)) < 1e-6 * peak);
}

TEST_CASE("phi2 and phi3 are dimensionless under rescaling of gamma_tot") {
  const double s = 2.5;
  EnsembleParams p = kBase;
  p.gamma_tot *= s;
  const Wavefield ws(p);
  const auto& w = base();
  for (double x : {0.0, 0.7, 3.0}) {
    CHECK(std::abs(ws.phi2_direct(x / s) - w.phi2_direct(x)) < 1e-10 * std::abs(w.phi2_direct(0.0)));
    CHECK(std::abs(ws.phi2(x / s, 0.0) - w.phi2(x, 0.0)) < 1e-10 * std::abs(w.phi2_direct(0.0)));
    // row tails are estimated from amplitudes near 1e3 gamma, which costs a few digits
    CHECK(std::abs(ws.phi3(x / s, 0.3 / s, 0.0) - w.phi3(x, 0.3, 0.0)) < 1e-8 * std::abs(w.phi3(0, 0, 0)));
  }
}

TEST_CASE("phi3 permutation symmetry and translation invariance") {
  const auto& w = base();
  const double x[3] = {0.4, -1.3, 2.1};
  const double ref = w.phi3(x[0], x[1], x[2]);
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& p : perms) CHECK(std::abs(w.phi3(x[p[0]], x[p[1]], x[p[2]]) - ref) < 1e-9 * std::abs(ref));
  for (double s : {-5.0, 0.25, 11.0})
    CHECK(std::abs(w.phi3(x[0] + s, x[1] + s, x[2] + s) - ref) < 1e-10 * std::abs(w.phi3(0, 0, 0)));
}

TEST_CASE("phi3 cluster decomposition") {
  const auto& w = base();
  CHECK(std::abs(w.phi3(0, 0, 30)) < 1e-3 * std::abs(w.phi3(0, 0, 0)));
}

TEST_CASE("phi3 self-convergence under doubled resolution") {
  // The tangent-mapped grid leaves an aliasing floor of order 1e-4 of the
  // peak at the largest separations; near the coincidence point it is much
  // smaller.
  WavefieldOptions fine;
  fine.phi3_nodes *= 2;
  const Wavefield w2(kBase, fine);
  const auto& w = base();
  const double peak = std::abs(w2.phi3(0, 0, 0));
  CHECK(std::abs(w.phi3(0, 0, 0) - w2.phi3(0, 0, 0)) < 1e-6 * peak);
  for (const auto& x : {std::array<double, 3>{0.5, 0, 0}, {1, 0.3, 0}, {2, 1, 0}})
    CHECK(std::abs(w.phi3(x[0], x[1], x[2]) - w2.phi3(x[0], x[1], x[2])) < 2e-5 * peak);
  for (const auto& x : {std::array<double, 3>{3, -1, 0.5}, {0, 0, 5}, {0, 0, 10}})
    CHECK(std::abs(w.phi3(x[0], x[1], x[2]) - w2.phi3(x[0], x[1], x[2])) < 3e-4 * peak);
}

TEST_CASE("psi3 factorizes when the photons are far apart") {
  const auto& w = base();
  const double t3 = w.t0_power(3);
  CHECK(std::abs(w.psi3(0, 40, 80) - t3) < 1e-3 * std::abs(t3));
  CHECK(std::abs(w.psi2(0, 40) - w.t0_power(2)) < 1e-3 * std::abs(w.t0_power(2)));
}

TEST_CASE("log-space powers of t0") {
  EnsembleParams p{0.05, 85, 1.0, 0.0};
  const Wavefield w(p, GaussianNull{});
  CHECK(w.t0_power(6) == doctest::Approx(std::pow(0.9, 6 * 85)).epsilon(1e-12));
  p.beta = 0.7;  // t0 < 0
  p.num_atoms = 3;
  const Wavefield n(p, GaussianNull{});
  CHECK(n.t0_power(1) == doctest::Approx(std::pow(-0.4, 3)).epsilon(1e-12));
}

TEST_CASE("invalid inputs are rejected") {
  EnsembleParams p = kBase;
  p.beta = 1.2;
  CHECK_THROWS_AS(Wavefield{p}, InvalidParams);
  WavefieldOptions o;
  o.table_step = -1;
  CHECK_THROWS_AS(Wavefield(kBase, o), InvalidParams);
}

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "wqed/correlators.hpp"
#include "wqed/oracle.hpp"

using namespace wqed;
using namespace wqed::oracle;

namespace {

EnsembleParams bench(double p_in = 0.02) { return {0.05, 2, 1.0, p_in}; }

}  // namespace

TEST_CASE("capacity limit") {
  EnsembleParams p = bench();
  p.num_atoms = kMaxAtoms + 1;
  CHECK_THROWS_AS(build_liouvillian(p), CapacityError);
  CHECK_THROWS_AS(HilbertSpace(12), CapacityError);
  CHECK(HilbertSpace(3).dim() == 8);
}

TEST_CASE("trace preservation of the generator") {
  for (int m = 0; m <= 4; ++m) {
    EnsembleParams p = bench(0.3);
    p.num_atoms = m;
    const auto L = build_liouvillian(p);
    CHECK(L.trace_preservation_residual() < 1e-12);
    const SparseOp S = L.assemble();
    const int d = L.dim();
    // row-major vectorization: entry (i, i) of rho is component i * d + i
    Eigen::VectorXcd id_row = Eigen::VectorXcd::Zero(d * d);
    for (int i = 0; i < d; ++i) id_row(i * d + i) = 1.0;
    const Eigen::VectorXcd left = S.adjoint() * id_row;
    CHECK(left.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("matrix-free action equals the assembled superoperator") {
  EnsembleParams p = bench(0.1);
  p.num_atoms = 3;
  const auto L = build_liouvillian(p);
  const int d = L.dim();
  const DenseOp rho = DenseOp::Random(d, d);
  const DenseOp out = L.apply(rho);
  Eigen::VectorXcd v(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) v(i * d + j) = rho(i, j);
  const Eigen::VectorXcd w = L.assemble() * v;
  double err = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) err = std::max(err, std::abs(w(i * d + j) - out(i, j)));
  CHECK(err < 1e-13);
}

TEST_CASE("two-atom spectrum is stable") {
  const auto L = build_liouvillian(bench(0.1));
  const Eigen::MatrixXcd dense = Eigen::MatrixXcd(L.assemble());
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(dense);
  CHECK(es.eigenvalues().real().maxCoeff() <= 1e-12);
}

TEST_CASE("undriven atom relaxes to the ground state") {
  EnsembleParams p = bench(0.0);
  p.num_atoms = 1;
  const auto ss = steady_state(build_liouvillian(p));
  CHECK(std::abs(ss.rho(0, 0)) > 1 - 1e-12);
  p.num_atoms = 3;
  const auto ss3 = steady_state(build_liouvillian(p));
  CHECK(std::abs(ss3.rho(0, 0)) > 1 - 1e-12);
}

TEST_CASE("single atom weak-drive population matches time integration") {
  EnsembleParams p{0.05, 1, 1.0, 1e-4};
  const auto L = build_liouvillian(p);
  const auto ss = steady_state(L);
  const double pop = ss.rho(1, 1).real();
  // Rabi frequency 2 sqrt(beta Gamma P) against total width Gamma/2
  CHECK(pop == doctest::Approx(4 * p.beta * p.drive_power).epsilon(1e-3));

  Propagator rk(L, 0, 0.01);  // RK4 substeps
  DenseOp rho = DenseOp::Zero(2, 2);
  rho(0, 0) = 1.0;
  rho = rk.advance(rho, 50.0);
  CHECK(std::abs(rho(1, 1).real() - pop) < 1e-6 * pop + 1e-15);
}

TEST_CASE("steady-state invariants up to six atoms") {
  for (int m = 0; m <= 6; ++m) {
    EnsembleParams p = bench();
    p.num_atoms = m;
    const auto ss = steady_state(build_liouvillian(p));
    CAPTURE(m);
    CHECK(ss.hermiticity_error() < 1e-12);
    CHECK(ss.trace_error() < 1e-12);
    CHECK(ss.min_eigenvalue() >= -1e-10);
    CHECK(ss.residual <= 1e-10);
  }
}

TEST_CASE("direct and integrated steady states agree") {
  EnsembleParams p = bench(0.04);
  p.num_atoms = 3;
  const auto L = build_liouvillian(p);
  SteadyStateOptions direct, integrated;
  integrated.direct_max_atoms = 0;
  const auto a = steady_state(L, direct), b = steady_state(L, integrated);
  CHECK(a.direct);
  CHECK_FALSE(b.direct);
  CHECK((a.rho - b.rho).norm() < 1e-9);
}

TEST_CASE("output field: flux, drive limit and affine structure") {
  EnsembleParams p = bench(0.3);
  p.num_atoms = 0;
  {
    const auto L = build_liouvillian(p);
    const auto ss = steady_state(L);
    const SparseOp a = output_field(L);
    const DenseOp ad_a = DenseOp(SparseOp(a.adjoint()) * a);
    CHECK((ss.rho * ad_a).trace().real() == doctest::Approx(0.3).epsilon(1e-12));
  }
  p.num_atoms = 1;
  p.drive_power = 1e-6;
  {
    const auto L = build_liouvillian(p);
    const auto ss = steady_state(L);
    const SparseOp a = output_field(L);
    const double flux = (ss.rho * DenseOp(SparseOp(a.adjoint()) * a)).trace().real();
    CHECK(flux / p.drive_power == doctest::Approx(0.81).epsilon(1e-4));
  }
  // affine in the drive amplitude: a - alpha is drive independent
  EnsembleParams q = p;
  q.drive_power = 0.5;
  const auto La = build_liouvillian(p), Lb = build_liouvillian(q);
  const DenseOp da = DenseOp(output_field(La)) - La.drive_amplitude() * DenseOp::Identity(2, 2);
  const DenseOp db = DenseOp(output_field(Lb)) - Lb.drive_amplitude() * DenseOp::Identity(2, 2);
  CHECK((da - db).norm() < 1e-15);
}

TEST_CASE("transmitted power at weak drive") {
  const auto L = build_liouvillian(bench());
  const auto ss = steady_state(L);
  const SparseOp a = output_field(L);
  const double flux = (ss.rho * DenseOp(SparseOp(a.adjoint()) * a)).trace().real();
  const double expect = 0.02 * std::pow(0.9, 4);
  CHECK(std::abs(flux - expect) < 0.05 * expect);
}

TEST_CASE("g2 from regression: limits and equal-time moment") {
  const Eigen::VectorXd tau = (Eigen::VectorXd(5) << 0.0, 0.5, 1.5, 3.0, 50.0).finished();
  const auto g = qrt_g2(bench(), tau);
  CHECK(std::abs(g.values(4, 0) - 1.0) < 1e-3);
  const auto L = build_liouvillian(bench());
  CHECK(std::abs(g.values(0, 0) - equal_time_g2(L, steady_state(L))) < 1e-10);
  CHECK(g.values.minCoeff() >= -1e-10);

  EnsembleParams none = bench();
  none.num_atoms = 0;
  const auto g0 = qrt_g2(none, tau);
  CHECK((g0.values.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("g2 from regression is independent of the propagator") {
  const Eigen::VectorXd tau = (Eigen::VectorXd(3) << 0.3, 1.1, 2.6).finished();
  QrtOptions expm, rk4;
  rk4.dense_max_atoms = 0;
  rk4.max_step = 0.005;
  const auto a = qrt_g2(bench(), tau, expm), b = qrt_g2(bench(), tau, rk4);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(a.values(i, 0) - b.values(i, 0)) < 1e-2 * a.values(i, 0));
}

TEST_CASE("g3 from regression: symmetry, factorization and decorrelation") {
  const Eigen::VectorXd t = (Eigen::VectorXd(6) << 0.0, 0.4, 1.3, 2.5, 40.0, 80.0).finished();
  const auto r = qrt_g3(bench(), t, t);
  const auto& g3v = r.g3.values;
  const auto& gc = r.g3_connected.values;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      CHECK(std::abs(g3v(i, j) - g3v(j, i)) < 1e-8);
      CHECK(g3v(i, j) >= -1e-10);
    }
  // all three photons far apart
  CHECK(std::abs(g3v(4, 5) - 1.0) < 2e-3);
  CHECK(std::abs(gc(4, 5)) < 2e-3);
  // a coincident pair far from the third photon
  CHECK(std::abs(gc(4, 4)) < 2e-3);
  const auto g2v = qrt_g2(bench(), t);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(g3v(i, 4) - g2v.values(i, 0)) < 1e-3);
  CHECK(r.photon_flux > 0);
}

TEST_CASE("diagrammatic g2 agrees with the oracle at weak drive") {
  const Eigen::VectorXd tau = Eigen::VectorXd::LinSpaced(11, 0, 5);
  const auto q = qrt_g2(bench(), tau);
  const Wavefield w(bench(), WavefieldOptions{.loops = true});
  for (int i = 0; i < tau.size(); ++i) CHECK(std::abs(g2(w, tau(i), 0) - q.values(i, 0)) < 0.03 * q.values(i, 0));
}

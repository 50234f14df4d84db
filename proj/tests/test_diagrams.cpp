#include <doctest.h>

#include <cmath>
#include <random>

#include "brute.hpp"
#include "wqed/diagrams.hpp"
#include "wqed/scatter.hpp"

using namespace wqed;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Momenta3 random_momenta(std::mt19937_64& rng, double width = 2.0) {
  std::uniform_real_distribution<double> u(-width, width);
  const double a = u(rng), b = u(rng);
  return {a, b, -a - b};
}

}  // namespace

TEST_CASE("geometric_sum examples") {
  const cplx t0 = 0.9;
  auto r = geometric_sum(t0 * t0 * t0, t0 * t0 * t0, 4);
  CHECK(r.degenerate);
  CHECK(rel(r.value, 4.0 * std::pow(t0, 9)) < 1e-15);
  r = geometric_sum(2.0, 1.0, 3);
  CHECK_FALSE(r.degenerate);
  CHECK(r.value == cplx(7.0));
  r = geometric_sum(2.0, 1.0, 0);
  CHECK(r.value == cplx(0.0));
  CHECK_FALSE(r.degenerate);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 50; ++i) {
    const cplx a(u(rng), u(rng)), b(u(rng), u(rng));
    cplx ref = 0;
    for (int j = 0; j < 7; ++j) ref += std::pow(a, 6 - j) * std::pow(b, j);
    CHECK(rel(geometric_sum(a, b, 7).value, ref) < 1e-12);
  }
}

TEST_CASE("complete homogeneous sums match nested loops, including near-degenerate nodes") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n : {0, 1, 2, 5, 17}) {
    for (int rep = 0; rep < 20; ++rep) {
      cplx x(u(rng), u(rng)), y(u(rng), u(rng)), z(u(rng), u(rng));
      if (rep % 4 == 1) y = x * (1.0 + 1e-9);
      if (rep % 4 == 2) z = y = x;
      cplx ref = 0;
      for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) ref += std::pow(x, i) * std::pow(y, j) * std::pow(z, n - i - j);
      CHECK(rel(complete_homogeneous3(n, x, y, z), ref) < 1e-10);
      const std::array<cplx, 3> nodes{x, y, z};
      CHECK(rel(complete_homogeneous(n, nodes), ref) < 1e-12);
    }
  }
}

TEST_CASE("three-vertex amplitude small-M examples") {
  const Momenta3 p{0.3, -0.7, 0.4};
  EnsembleParams par{0.05, 1, 1.0, 0.0};
  const cplx s3 = connected_s3_resonant<double>(p, 1.0);
  CHECK(rel(t3v_amplitude(p, par), std::pow(0.05, 3) * s3) < 1e-15);

  par.num_atoms = 2;
  const Momenta3 z{0, 0, 0};
  const double t0 = 0.9;
  CHECK(rel(t3v_amplitude(z, par), 2 * std::pow(0.05, 3) * std::pow(t0, 3) * connected_s3_resonant<double>(z, 1.0)) <
        1e-14);

  par.num_atoms = 0;
  CHECK(t3v_amplitude(p, par) == cplx(0.0));
}

TEST_CASE("four-vertex amplitude small-M examples") {
  const Momenta3 p{0.3, -0.7, 0.4};
  EnsembleParams par{0.05, 1, 1.0, 0.0};
  CHECK(t4v_amplitude(p, par) == cplx(0.0));
  par.num_atoms = 2;
  const double b2 = 0.05 * 0.05;
  const cplx ref = transmission(p[0], par) * b2 * connected_s2<double>(p[1], p[2], -p[0], 0.0, 1.0) * b2 *
                   connected_s2<double>(p[0], -p[0], 0.0, 0.0, 1.0) * 0.9;
  CHECK(rel(t4v_amplitude(p, par), ref) < 1e-14);
}

TEST_CASE("closed forms equal explicit site sums") {
  std::mt19937_64 rng(17);
  for (int m : {1, 2, 3, 6, 8, 15, 32}) {
    for (double beta : {0.01, 0.05, 0.3}) {
      EnsembleParams par{beta, m, 1.0, 0.0};
      for (int i = 0; i < 10; ++i) {
        const Momenta3 p = random_momenta(rng);
        CHECK(rel(t3v_amplitude(p, par), cplx(brute::t3v(p, par))) < 1e-12);
        CHECK(rel(t4v_sum(p, par), cplx(brute::t4v_sum(p, par))) < 1e-11);
        CHECK(rel(t4v_amplitude(p, par, {2, 0, 1}), cplx(brute::t4v(p, par, {2, 0, 1}))) < 1e-11);
      }
    }
  }
}

TEST_CASE("tree amplitude is permutation symmetric") {
  std::mt19937_64 rng(19);
  EnsembleParams par{0.05, 7, 1.0, 0.0};
  for (int i = 0; i < 30; ++i) {
    const Momenta3 p = random_momenta(rng);
    const cplx ref = tree_amplitude(p, par);
    for (const Momenta3& q : {Momenta3{p[1], p[0], p[2]}, Momenta3{p[2], p[1], p[0]}, Momenta3{p[1], p[2], p[0]}}) {
      CHECK(rel(t3v_amplitude(q, par), t3v_amplitude(p, par)) < 1e-10);
      CHECK(rel(tree_amplitude(q, par), ref) < 1e-10);
    }
  }
}

TEST_CASE("beta scaling of the single-atom three-vertex amplitude") {
  const Momenta3 p{0.2, 0.5, -0.7};
  EnsembleParams a{0.02, 1, 1.0, 0.0}, b{0.04, 1, 1.0, 0.0};
  CHECK(rel(t3v_amplitude(p, b), 8.0 * t3v_amplitude(p, a)) < 1e-14);
}

TEST_CASE("amplitudes fall off at large momenta") {
  EnsembleParams par{0.05, 4, 1.0, 0.0};
  const double near = std::abs(tree_amplitude({0.1, 0.2, -0.3}, par));
  const double far = std::abs(tree_amplitude({1e4, 0.2, -1e4 - 0.2}, par));
  CHECK(far < 1e-6 * near);
}

TEST_CASE("diagram bookkeeping") {
  CHECK(beta_power(DiagramKind::ThreeVertex) == 3);
  CHECK(beta_power(DiagramKind::FourVertex) == 4);
  CHECK(beta_power(DiagramKind::LoopThreeTwo) == 5);
  CHECK(beta_power(DiagramKind::LoopTwoTwoTwo) == 6);
  CHECK(vertex_count(DiagramKind::ThreeVertex) == 1);
  CHECK(vertex_count(DiagramKind::FourVertex) == 2);
  CHECK(vertex_count(DiagramKind::LoopThreeTwo) == 2);
  CHECK(vertex_count(DiagramKind::LoopTwoTwoTwo) == 3);
  const auto& seqs = loop_sequences();
  CHECK(seqs.size() == 30);
  int three_two = 0, pairs = 0;
  for (const auto& s : seqs) (s.kind == DiagramKind::LoopThreeTwo ? three_two : pairs)++;
  CHECK(three_two == 6);
  CHECK(pairs == 24);
}

TEST_CASE("loop diagrams vanish when there are too few sites") {
  const Momenta3 p{0.3, -0.1, -0.2};
  for (int m : {0, 1}) {
    EnsembleParams par{0.05, m, 1.0, 0.0};
    CHECK(std::abs(loop_amplitudes(p, par).value) == 0.0);
  }
  EnsembleParams par{0.05, 2, 1.0, 0.0};
  for (const auto& s : loop_sequences())
    if (s.kind == DiagramKind::LoopTwoTwoTwo) CHECK(std::abs(sequence_amplitude(s, p, 0.37, par)) == 0.0);
}

TEST_CASE("loop integral self-convergence and fixed rule agreement") {
  const Momenta3 p{0.4, -0.1, -0.3};
  EnsembleParams par{0.05, 6, 1.0, 0.0};
  const auto a = loop_amplitudes(p, par);
  LoopOptions tight;
  tight.rel_tol = 1e-11;
  const auto b = loop_amplitudes(p, par, tight);
  CHECK(rel(a.value, b.value) < 1e-7);
  CHECK(a.error <= 1e-8 * std::abs(a.value) + 1e-14);
  CHECK(rel(loop_amplitudes_fixed(p, par, 96), b.value) < 1e-5);
}

TEST_CASE("loop corrections are small at one percent coupling") {
  EnsembleParams par{0.01, 50, 1.0, 0.0};  // OD = 2
  std::mt19937_64 rng(23);
  for (int i = 0; i < 5; ++i) {
    const Momenta3 p = random_momenta(rng, 0.5);
    CHECK(std::abs(loop_amplitudes(p, par).value) < 0.1 * std::abs(tree_amplitude(p, par)));
  }
}

TEST_CASE("quadrature failure carries the estimate") {
  const Momenta3 p{0.4, -0.1, -0.3};
  EnsembleParams par{0.05, 6, 1.0, 0.0};
  LoopOptions bad;
  bad.rel_tol = 1e-16;
  bad.abs_tol = 0;
  bad.max_depth = 2;
  try {
    loop_amplitudes(p, par, bad);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(std::isfinite(e.estimate));
    CHECK(e.error_bound > 0);
  }
}

#pragma once

// Explicit site-by-site summations used as references for the closed forms.

#include <array>
#include <complex>

#include "wqed/params.hpp"
#include "wqed/scatter.hpp"

namespace wqed::brute {

using lcplx = std::complex<long double>;

inline lcplx t_ld(double k, const EnsembleParams& p) {
  return transmission<long double>(k, p.beta, p.gamma_tot);
}

/// Three-photon vertex at site j (1-based): all three photons pass j-1 atoms
/// at resonance, then M-j atoms with their outgoing momenta.
inline lcplx t3v(const std::array<double, 3>& p, const EnsembleParams& par) {
  const long double b = par.beta;
  const lcplx t0 = t_ld(0.0, par);
  const lcplx out = t_ld(p[0], par) * t_ld(p[1], par) * t_ld(p[2], par);
  const std::array<long double, 3> pl{p[0], p[1], p[2]};
  const lcplx s3 = connected_s3_resonant<long double>(pl, par.gamma_tot);
  lcplx sum = 0;
  for (int j = 1; j <= par.num_atoms; ++j) {
    lcplx term = 1;
    for (int s = 1; s < j; ++s) term *= t0 * t0 * t0;
    for (int s = j + 1; s <= par.num_atoms; ++s) term *= out;
    sum += term;
  }
  return b * b * b * s3 * sum;
}

/// Two pair vertices at sites a < b. The photon leaving vertex a with
/// momentum p[perm[0]] is a spectator at b; its partner carries q = -p[perm[0]]
/// into b, where it meets the third (still resonant) photon.
inline lcplx t4v(const std::array<double, 3>& pin, const EnsembleParams& par, const std::array<int, 3>& perm) {
  const double p1 = pin[perm[0]], p2 = pin[perm[1]], p3 = pin[perm[2]], q = -p1;
  const long double b2 = static_cast<long double>(par.beta) * par.beta;
  const long double g = par.gamma_tot;
  const lcplx t0 = t_ld(0.0, par), t1 = t_ld(p1, par), tq = t_ld(q, par);
  const lcplx t2 = t_ld(p2, par), t3 = t_ld(p3, par);
  const lcplx first = b2 * connected_s2<long double>(p1, q, 0, 0, g);
  const lcplx second = b2 * connected_s2<long double>(p2, p3, q, 0, g);
  lcplx sum = 0;
  const int m = par.num_atoms;
  for (int a = 1; a <= m; ++a)
    for (int b = a + 1; b <= m; ++b) {
      lcplx term = first * second;
      for (int s = 1; s < a; ++s) term *= t0 * t0 * t0;
      term *= t0;  // third photon passes site a
      for (int s = a + 1; s < b; ++s) term *= t1 * tq * t0;
      term *= t1;  // spectator passes site b
      for (int s = b + 1; s <= m; ++s) term *= t1 * t2 * t3;
      sum += term;
    }
  return sum;
}

inline lcplx t4v_sum(const std::array<double, 3>& p, const EnsembleParams& par) {
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  lcplx s = 0;
  for (const auto& pr : perms) s += t4v(p, par, pr);
  return s;
}

}  // namespace wqed::brute

#pragma once

// Single-emitter scattering data for a chiral two-level atom.
//
// Conventions: momenta are detunings from resonance. Connected amplitudes are
// densities multiplying the total-momentum delta 2*pi*delta(sum p - sum k);
// the delta is never returned. For an n-photon input normalised as the
// symmetrised plane wave divided by n!, the connected position-space output
// is (2 pi)^-(n-1) times the integral of S^C exp(i p.x) over the n-1
// independent outgoing momenta.

#include <array>
#include <complex>
#include <vector>

#include "wqed/params.hpp"

namespace wqed {

template <typename Real>
using Complex = std::complex<Real>;

/// Waveguide transmission t_k = 1 - i beta G / (k + i G/2).
template <typename Real>
Complex<Real> transmission(Real k, Real beta, Real gamma_tot) {
  const Complex<Real> den(k, gamma_tot / 2);
  return Real(1) - Complex<Real>(0, beta * gamma_tot) / den;
}

/// Amplitude for a photon leaving the waveguide into the loss channel.
template <typename Real>
Complex<Real> reflection(Real k, Real beta, Real gamma_tot) {
  using std::sqrt;
  const Complex<Real> den(k, gamma_tot / 2);
  return -sqrt(beta * (Real(1) - beta)) * Complex<Real>(0, gamma_tot) / den;
}

inline std::complex<double> transmission(double k, const EnsembleParams& p) {
  return transmission<double>(k, p.beta, p.gamma_tot);
}

inline std::complex<double> reflection(double k, const EnsembleParams& p) {
  return reflection<double>(k, p.beta, p.gamma_tot);
}

/// Connected two-photon S-matrix density of the even (fully coupled) channel:
///   i G^2 (E + i G) / prod_{q in {k1,k2,p1,p2}} (q + i G/2),  E = k1 + k2.
template <typename Real>
Complex<Real> connected_s2(Real p1, Real p2, Real k1, Real k2, Real gamma_tot) {
  const Real h = gamma_tot / 2;
  // pairwise grouping keeps the result exactly symmetric under p1 <-> p2, k1 <-> k2
  const Complex<Real> den = (Complex<Real>(k1, h) * Complex<Real>(k2, h)) *
                            (Complex<Real>(p1, h) * Complex<Real>(p2, h));
  const Complex<Real> num(-gamma_tot, k1 + k2);  // i (E + i G)
  return gamma_tot * gamma_tot * num / den;
}

/// Connected three-photon S-matrix density of the even channel.
///
///   (2i/3) G^3 / prod_c (k_c + i G/2)
///     * sum_{i != j} sum_c 1 / [(G/2 + i (p_i + k_c - K)) (G/2 - i p_j)]
///
/// with K the total momentum. At all-resonant input this reduces to
/// -16 sum_{i != j} 1 / [(G/2 + i p_i)(G/2 - i p_j)], the Fourier transform
/// of -16 exp(-G (x_max - x_min) / 2).
template <typename Real>
Complex<Real> connected_s3(const std::array<Real, 3>& p, const std::array<Real, 3>& k,
                           Real gamma_tot) {
  const Real h = gamma_tot / 2;
  const Real K = k[0] + k[1] + k[2];
  const Complex<Real> in_den = Complex<Real>(k[0], h) * Complex<Real>(k[1], h) * Complex<Real>(k[2], h);
  std::array<Complex<Real>, 3> out_right;
  for (int j = 0; j < 3; ++j) out_right[j] = Real(1) / Complex<Real>(h, -p[j]);
  Complex<Real> sum(0);
  for (int i = 0; i < 3; ++i) {
    Complex<Real> left(0);
    for (int c = 0; c < 3; ++c) left += Real(1) / Complex<Real>(h, p[i] + k[c] - K);
    Complex<Real> right(0);
    for (int j = 0; j < 3; ++j)
      if (j != i) right += out_right[j];
    sum += left * right;
  }
  const Real g3 = gamma_tot * gamma_tot * gamma_tot;
  return Complex<Real>(0, Real(2) / Real(3) * g3) / in_den * sum;
}

/// Specialisation for resonant input, used by the diagram sums.
template <typename Real>
Complex<Real> connected_s3_resonant(const std::array<Real, 3>& p, Real gamma_tot) {
  const Real h = gamma_tot / 2;
  std::array<Complex<Real>, 3> a, b;
  for (int i = 0; i < 3; ++i) {
    a[i] = Real(1) / Complex<Real>(h, p[i]);
    b[i] = Real(1) / Complex<Real>(h, -p[i]);
  }
  const Complex<Real> sa = a[0] + a[1] + a[2];
  const Complex<Real> sb = b[0] + b[1] + b[2];
  const Complex<Real> diag = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return Real(-16) * (sa * sb - diag);
}

/// Connected amplitude together with the momenta it was evaluated at.
struct ConnectedAmplitude {
  std::complex<double> value;
  std::vector<double> in_momenta;
  std::vector<double> out_momenta;
};

inline ConnectedAmplitude connected_s2(double p1, double p2, double k1, double k2,
                                       const EnsembleParams& params) {
  return {connected_s2<double>(p1, p2, k1, k2, params.gamma_tot), {k1, k2}, {p1, p2}};
}

inline ConnectedAmplitude connected_s3(const std::array<double, 3>& p,
                                       const std::array<double, 3>& k,
                                       const EnsembleParams& params) {
  return {connected_s3<double>(p, k, params.gamma_tot), {k.begin(), k.end()}, {p.begin(), p.end()}};
}

}  // namespace wqed

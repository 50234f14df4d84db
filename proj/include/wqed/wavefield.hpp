#pragma once

// Position-space correlated wavefunctions of the transmitted light.
//
// phi2(x1, x2) and phi3(x1, x2, x3) are the connected two- and three-photon
// output amplitudes for resonant input, per unit input amplitude. They depend
// only on coordinate differences and are real.

#include <array>
#include <complex>
#include <memory>
#include <vector>

#include "wqed/params.hpp"

namespace wqed {

struct WavefieldOptions {
  bool loops = false;        ///< include loop-order diagrams
  int phi2_nodes = 1600;     ///< half-line nodes for the phi2 transform
  int phi2_loop_nodes = 160; ///< loop-momentum nodes inside phi2
  double table_step = 0.01;  ///< phi2 table spacing (units 1/gamma_tot)
  double table_range = 40.0; ///< phi2 table extent
  int phi3_nodes = 320;      ///< per-axis nodes of the tree-level phi3 transform
  int phi3_loop_nodes = 80;  ///< per-axis nodes of the loop-level phi3 transform
  int loop_nodes = 48;       ///< loop-momentum nodes per phi3 grid node
};

/// Force the connected amplitudes to zero (Gaussian reference).
struct GaussianNull {};

class Wavefield {
 public:
  Wavefield(const EnsembleParams& params, const WavefieldOptions& opts = {});
  Wavefield(const EnsembleParams& params, GaussianNull);

  const EnsembleParams& params() const { return params_; }
  const WavefieldOptions& options() const { return opts_; }
  bool gaussian_null() const { return null_; }

  /// Table lookup with cubic interpolation; direct transform outside the table.
  double phi2(double x1, double x2) const;
  /// Direct quadrature at relative coordinate dx (no table).
  double phi2_direct(double dx) const;

  double phi3(double x1, double x2, double x3) const;
  /// phi3 at canonical differences a = x_max - x_min, c = x_mid - x_min.
  double phi3_canonical(double a, double c) const;

  /// Momentum-space two-photon transport amplitude T2(p, -p).
  double t2_momentum(double p) const;

  /// t0^(n M) evaluated through logarithms; sign kept for t0 < 0.
  double t0_power(int n) const;

  double psi2(double x1, double x2) const;
  double psi3(double x1, double x2, double x3) const;

 private:
  struct Piece {
    std::vector<double> u, v;               // node positions
    std::vector<std::complex<double>> t;    // weighted amplitudes, row-major u x v
    std::vector<std::complex<double>> tail_a, tail_b;  // per-row tail coefficients
    double kappa = 1.0;
  };

  void build_phi2();
  void build_phi3();
  std::array<Piece, 3> make_pieces(int nodes, bool loop_part) const;
  double transform(const std::array<Piece, 3>& pieces, double a, double c) const;

  EnsembleParams params_;
  WavefieldOptions opts_;
  bool null_ = false;

  // phi2 transform data: phi2(x) = sum_i w_i r_i cos(p_i x) + tail e^{-G|x|/2}
  std::vector<double> p2_nodes_, p2_weighted_;
  double p2_tail_ = 0.0;
  std::vector<double> p2_table_;

  std::array<Piece, 3> tree_;
  std::array<Piece, 3> loop_;
};

}  // namespace wqed

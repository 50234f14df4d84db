#pragma once

// Normalized photon correlation functions of the transmitted field in the
// weak-drive limit, plus grids and the triple-coincidence count rate.

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "wqed/params.hpp"
#include "wqed/wavefield.hpp"

namespace wqed {

struct JacobiPoint {
  double R = 0, eta = 0, zeta = 0;
};

JacobiPoint to_jacobi(double x1, double x2, double x3);
std::array<double, 3> from_jacobi(const JacobiPoint& j);

enum class CorrelationKind { G2, G3, G3Connected, G3ConnectedUnnormalized };
enum class Method { Diagrammatic, Oracle };

const char* to_string(CorrelationKind k);
const char* to_string(Method m);

/// Values on a tensor grid: values(i, j) sits at (x(i), y(j)). One-dimensional
/// grids keep a single column and an empty y axis.
struct CorrelationGrid {
  Eigen::VectorXd x, y;
  Eigen::MatrixXd values;
  std::string x_name = "x", y_name = "y";
  CorrelationKind kind = CorrelationKind::G3Connected;
  Method method = Method::Diagrammatic;
  EnsembleParams params;
  bool loops = false;
};

/// Thrown when t0 = 0 makes the normalization by t0^(nM) meaningless.
class SingularNormalization : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Warning text when the drive leaves the weak-drive regime (P_in > beta Gamma_tot).
std::optional<std::string> weak_drive_warning(const EnsembleParams& p);

double g2(const Wavefield& w, double x1, double x2);
double g3(const Wavefield& w, double x1, double x2, double x3);
double g3_connected(const Wavefield& w, double x1, double x2, double x3);
/// g_c3 times the product of the three output fluxes, P_in t0^(2M) each.
double g3_connected_unnormalized(const Wavefield& w, double x1, double x2, double x3);

/// g_c3 on the (eta, zeta) plane at fixed R.
CorrelationGrid jacobi_grid(const Wavefield& w, double eta_lo, double eta_hi, double zeta_lo, double zeta_hi,
                            int n, double R = 0.0, int threads = 1);

/// g_c3(t1, t2, 0) on a uniform n x n grid over [lo, hi]^2.
CorrelationGrid time_grid(const Wavefield& w, double lo, double hi, int n, int threads = 1);

struct CountRate {
  double rate_hz = 0;       ///< triple coincidence rate
  double integral = 0;      ///< dimensionless window integral of |g_c3(t1,t2,0)|
  double error_estimate = 0;
  std::optional<std::string> warning;
};

struct CountRateOptions {
  int panels = 8;          ///< Gauss-Legendre panels per axis
  int order = 8;           ///< points per panel
  double rel_tol = 1e-2;   ///< accepted relative disagreement of the coarse and fine rules
};

/// Rate of connected triple coincidences within `window` (units 1/Gamma_tot),
/// converted to Hz with Gamma_tot = gamma_tot_hz.
CountRate count_rate(const Wavefield& w, double gamma_tot_hz, double window = 3.0,
                     const CountRateOptions& opts = {});

}  // namespace wqed

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace wqed {

/// Physical description of a chirally coupled ensemble of M two-level atoms.
///
/// Rates and momenta are expressed in units of the total single-atom decay
/// rate; `gamma_tot` is kept as a field so that scaling checks can run the
/// same formulas with a non-unit rate.
struct EnsembleParams {
  double beta = 0.01;        ///< waveguide coupling efficiency, 0 < beta < 1
  int num_atoms = 1;         ///< M >= 0
  double gamma_tot = 1.0;    ///< total decay rate, > 0
  double drive_power = 0.0;  ///< input photon flux P_in, >= 0

  double gamma_wg() const { return beta * gamma_tot; }
  double gamma_loss() const { return (1.0 - beta) * gamma_tot; }
  double optical_depth() const { return 4.0 * beta * num_atoms; }
  /// Resonant single-atom transmission 1 - 2 beta.
  double t0() const { return 1.0 - 2.0 * beta; }
};

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Empty string when valid, otherwise a semicolon separated list of violations.
inline std::string validation_errors(const EnsembleParams& p) {
  std::string err;
  auto add = [&err](const char* msg) {
    if (!err.empty()) err += "; ";
    err += msg;
  };
  if (!(p.beta > 0.0 && p.beta < 1.0)) add("beta must lie in (0,1)");
  if (p.num_atoms < 0) add("num_atoms must be >= 0");
  if (!(p.gamma_tot > 0.0) || !std::isfinite(p.gamma_tot)) add("gamma_tot must be > 0");
  if (!(p.drive_power >= 0.0) || !std::isfinite(p.drive_power)) add("drive_power must be >= 0");
  return err;
}

inline void validate(const EnsembleParams& p) {
  if (auto err = validation_errors(p); !err.empty()) throw InvalidParams(err);
}

}  // namespace wqed

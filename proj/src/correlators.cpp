#include "wqed/correlators.hpp"

#include <cmath>
#include <sstream>

#include "wqed/diagrams.hpp"
#include "wqed/parallel.hpp"
#include "wqed/quadrature.hpp"

namespace wqed {

namespace {

const double kS2 = std::sqrt(2.0), kS3 = std::sqrt(3.0), kS6 = std::sqrt(6.0);

// t0^(nM); throws when the normalization vanishes.
double norm_power(const Wavefield& w, int n) {
  const double v = w.t0_power(n);
  if (v == 0.0 || !std::isfinite(1.0 / v))
    throw SingularNormalization("t0^(nM) vanishes (beta = 0.5 or extreme optical depth); correlators undefined");
  return v;
}

}  // namespace

JacobiPoint to_jacobi(double x1, double x2, double x3) {
  return {(x1 + x2 + x3) / kS3, (x1 - x2) / kS2, std::sqrt(2.0 / 3.0) * (0.5 * (x1 + x2) - x3)};
}

std::array<double, 3> from_jacobi(const JacobiPoint& j) {
  const double c = j.R / kS3;
  return {c + j.eta / kS2 + j.zeta / kS6, c - j.eta / kS2 + j.zeta / kS6, c - 2.0 * j.zeta / kS6};
}

const char* to_string(CorrelationKind k) {
  switch (k) {
    case CorrelationKind::G2: return "g2";
    case CorrelationKind::G3: return "g3";
    case CorrelationKind::G3Connected: return "g3_connected";
    case CorrelationKind::G3ConnectedUnnormalized: return "G3_connected";
  }
  return "?";
}

const char* to_string(Method m) { return m == Method::Oracle ? "oracle" : "diagrammatic"; }

std::optional<std::string> weak_drive_warning(const EnsembleParams& p) {
  if (p.drive_power > p.beta * p.gamma_tot) {
    std::ostringstream os;
    os << "drive power " << p.drive_power << " exceeds beta*gamma_tot = " << p.beta * p.gamma_tot
       << "; weak-drive results are qualitative only";
    return os.str();
  }
  return std::nullopt;
}

double g2(const Wavefield& w, double x1, double x2) {
  const double r = 1.0 + w.phi2(x1, x2) / norm_power(w, 2);
  return r * r;
}

double g3(const Wavefield& w, double x1, double x2, double x3) {
  const double s2 = w.phi2(x1, x2) + w.phi2(x1, x3) + w.phi2(x2, x3);
  const double r = 1.0 + s2 / norm_power(w, 2) + w.phi3(x1, x2, x3) / norm_power(w, 3);
  return r * r;
}

double g3_connected(const Wavefield& w, double x1, double x2, double x3) {
  const double n2 = norm_power(w, 2), n3 = norm_power(w, 3);
  const double a = w.phi2(x1, x2) / n2, b = w.phi2(x1, x3) / n2, c = w.phi2(x2, x3) / n2;
  const double f3 = w.phi3(x1, x2, x3) / n3;
  const double r3 = 1.0 + a + b + c + f3;
  const double sum2 = (1.0 + a) * (1.0 + a) + (1.0 + b) * (1.0 + b) + (1.0 + c) * (1.0 + c);
  return 2.0 + r3 * r3 - sum2;
}

double g3_connected_unnormalized(const Wavefield& w, double x1, double x2, double x3) {
  const double flux = w.params().drive_power * w.t0_power(2);
  return g3_connected(w, x1, x2, x3) * flux * flux * flux;
}

CorrelationGrid jacobi_grid(const Wavefield& w, double eta_lo, double eta_hi, double zeta_lo, double zeta_hi,
                            int n, double R, int threads) {
  if (n < 2) throw InvalidParams("grid resolution must be >= 2");
  CorrelationGrid g;
  g.x = Eigen::VectorXd::LinSpaced(n, eta_lo, eta_hi);
  g.y = Eigen::VectorXd::LinSpaced(n, zeta_lo, zeta_hi);
  g.x_name = "eta";
  g.y_name = "zeta";
  g.kind = CorrelationKind::G3Connected;
  g.params = w.params();
  g.loops = w.options().loops;
  g.values.resize(n, n);
  parallel_for(n, threads, [&](int i) {
    for (int j = 0; j < n; ++j) {
      const auto x = from_jacobi({R, g.x(i), g.y(j)});
      g.values(i, j) = g3_connected(w, x[0], x[1], x[2]);
    }
  });
  return g;
}

CorrelationGrid time_grid(const Wavefield& w, double lo, double hi, int n, int threads) {
  if (n < 2) throw InvalidParams("grid resolution must be >= 2");
  CorrelationGrid g;
  g.x = Eigen::VectorXd::LinSpaced(n, lo, hi);
  g.y = g.x;
  g.x_name = "t1";
  g.y_name = "t2";
  g.kind = CorrelationKind::G3Connected;
  g.params = w.params();
  g.loops = w.options().loops;
  g.values.resize(n, n);
  parallel_for(n, threads, [&](int i) {
    for (int j = 0; j <= i; ++j) {
      const double v = g3_connected(w, g.x(i), g.y(j), 0.0);
      g.values(i, j) = v;
      g.values(j, i) = v;
    }
  });
  return g;
}

namespace {

// Integral of |g_c3(t1, t2, 0)| over [0, w]^2 using the t1 <-> t2 symmetry:
// twice the triangle t2 < t1, mapped as t1 = w s, t2 = t1 r.
double window_integral(const Wavefield& wf, double window, int panels, int order) {
  quad::Rule rule;
  const quad::Rule base = quad::gauss_legendre(order, 0.0, 1.0 / panels);
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < base.size(); ++i) {
      rule.x.push_back(base.x[i] + double(p) / panels);
      rule.w.push_back(base.w[i]);
    }
  double total = 0.0;
  for (std::size_t a = 0; a < rule.size(); ++a) {
    const double t1 = window * rule.x[a];
    double inner = 0.0;
    for (std::size_t b = 0; b < rule.size(); ++b)
      inner += rule.w[b] * std::abs(g3_connected(wf, t1, t1 * rule.x[b], 0.0));
    total += rule.w[a] * window * t1 * inner;
  }
  return 2.0 * total;
}

}  // namespace

CountRate count_rate(const Wavefield& w, double gamma_tot_hz, double window, const CountRateOptions& opts) {
  if (!(window > 0.0)) throw InvalidParams("count-rate window must be > 0");
  if (!(gamma_tot_hz > 0.0)) throw InvalidParams("gamma_tot_hz must be > 0");
  if (opts.panels < 2 || opts.order < 2) throw InvalidParams("count-rate quadrature needs >= 2 panels and points");
  const auto& p = w.params();
  CountRate out;
  out.warning = weak_drive_warning(p);
  const double win = window / p.gamma_tot;
  const double gsq = p.gamma_tot * p.gamma_tot;
  const double fine = gsq * window_integral(w, win, opts.panels, opts.order);
  const double coarse = gsq * window_integral(w, win, opts.panels / 2, opts.order);
  out.integral = fine;
  out.error_estimate = std::abs(fine - coarse);
  if (out.error_estimate > opts.rel_tol * std::abs(fine) && out.error_estimate > 1e-14)
    throw QuadratureError("count-rate window integral not converged", fine, out.error_estimate);
  // flux per unit Gamma_tot
  const double flux = p.drive_power / p.gamma_tot * w.t0_power(2);
  out.rate_hz = gamma_tot_hz * flux * flux * flux * fine;
  return out;
}

}  // namespace wqed

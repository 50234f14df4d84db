#include "wqed/quadrature.hpp"

#include <stdexcept>

namespace wqed::quad {

Rule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1, p1 = 0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

Rule gauss_legendre(int n, double a, double b) {
  Rule r = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.x[i] = c + h * r.x[i];
    r.w[i] *= h;
  }
  return r;
}

Rule tangent_rule(int n, double scale, double center) {
  Rule r = gauss_legendre(n);
  const double h = 0.5 * std::numbers::pi;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double th = h * r.x[i];
    const double c = std::cos(th);
    r.x[i] = center + scale * std::tan(th);
    r.w[i] *= h * scale / (c * c);
  }
  return r;
}

Rule tangent_half_rule(int n, double scale) {
  Rule r = gauss_legendre(n, 0.0, 0.5 * std::numbers::pi);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double c = std::cos(r.x[i]);
    r.x[i] = scale * std::tan(r.x[i]);
    r.w[i] *= scale / (c * c);
  }
  return r;
}

}  // namespace wqed::quad

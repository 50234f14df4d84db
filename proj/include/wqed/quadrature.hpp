#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace wqed::quad {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule gauss_legendre(int n);

/// Gauss-Legendre rule on [a, b].
Rule gauss_legendre(int n, double a, double b);

/// Real-line rule from x = center + scale * tan(theta), theta Gauss-Legendre
/// on (-pi/2, pi/2). Weights include the Jacobian.
Rule tangent_rule(int n, double scale = 1.0, double center = 0.0);

/// Half-line rule on [0, inf) from x = scale * tan(theta).
Rule tangent_half_rule(int n, double scale = 1.0);

namespace detail {
// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <typename T, typename F>
void gk15(F& f, double a, double b, T& result, double& err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const T fc = f(c);
  T rk = fc * kWgk[7];
  T rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const T f1 = f(c - dx), f2 = f(c + dx);
    rk += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) rg += (f1 + f2) * kWg[j / 2];
  }
  result = rk * h;
  err = magnitude((rk - rg) * h);
}

template <typename T, typename F>
void adapt(F& f, double a, double b, double tol, int depth, T& total, double& err_total, bool& ok) {
  T r;
  double e;
  gk15<T>(f, a, b, r, e);
  if (e <= tol || depth <= 0) {
    if (e > tol) ok = false;
    total += r;
    err_total += e;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt<T>(f, a, m, 0.5 * tol, depth - 1, total, err_total, ok);
  adapt<T>(f, m, b, 0.5 * tol, depth - 1, total, err_total, ok);
}
}  // namespace detail

template <typename T>
struct Adaptive {
  T value{};
  double error = 0;
  bool converged = true;
};

/// Adaptive Gauss-Kronrod on [a, b]. The tolerance is max(abs_tol, rel_tol *
/// |coarse estimate|), split between subintervals.
template <typename T, typename F>
Adaptive<T> integrate(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                      int max_depth = 30) {
  T coarse;
  double e;
  detail::gk15<T>(f, a, b, coarse, e);
  const double tol = std::max(abs_tol, rel_tol * detail::magnitude(coarse));
  Adaptive<T> out;
  out.value = T{};
  detail::adapt<T>(f, a, b, tol, max_depth, out.value, out.error, out.converged);
  return out;
}

/// Adaptive integral over the whole real line via x = scale * tan(theta).
template <typename T, typename F>
Adaptive<T> integrate_real_line(F&& f, double scale, double rel_tol, double abs_tol = 0.0,
                                int max_depth = 30) {
  auto g = [&](double th) -> T {
    const double c = std::cos(th);
    return f(scale * std::tan(th)) * (scale / (c * c));
  };
  const double lim = 0.5 * std::numbers::pi;
  return integrate<T>(g, -lim, lim, rel_tol, abs_tol, max_depth);
}

}  // namespace wqed::quad

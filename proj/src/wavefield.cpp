#include "wqed/wavefield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wqed/diagrams.hpp"
#include "wqed/quadrature.hpp"
#include "wqed/scatter.hpp"

namespace wqed {

namespace {
constexpr double kPi = std::numbers::pi;
}

Wavefield::Wavefield(const EnsembleParams& params, const WavefieldOptions& opts)
    : params_(params), opts_(opts) {
  validate(params_);
  if (opts_.table_step <= 0 || opts_.table_range <= 0 || opts_.phi2_nodes < 8 || opts_.phi3_nodes < 8)
    throw InvalidParams("Wavefield: invalid quadrature options");
  build_phi2();
  build_phi3();
}

Wavefield::Wavefield(const EnsembleParams& params, GaussianNull) : params_(params), null_(true) {
  validate(params_);
}

double Wavefield::t0_power(int n) const {
  const double t0 = params_.t0();
  const long long e = static_cast<long long>(n) * params_.num_atoms;
  if (e == 0) return 1.0;
  if (t0 == 0.0) return 0.0;
  const double mag = std::exp(static_cast<double>(e) * std::log(std::abs(t0)));
  return (t0 < 0 && (e % 2 != 0)) ? -mag : mag;
}

double Wavefield::t2_momentum(double p) const {
  const int m = params_.num_atoms;
  if (m <= 0) return 0.0;
  const double b2 = params_.beta * params_.beta;
  const double g = params_.gamma_tot;
  const double t0sq = params_.t0() * params_.t0();
  const double tp = std::norm(transmission(p, params_));
  const cplx z1[2] = {t0sq, tp};
  double val = (b2 * connected_s2<double>(p, -p, 0.0, 0.0, g) * complete_homogeneous(m - 1, z1)).real();
  if (opts_.loops && m >= 2) {
    const auto rule = quad::tangent_rule(opts_.phi2_loop_nodes, 0.5 * g);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double l = rule.x[i];
      const double tl = std::norm(transmission(l, params_));
      const cplx z2[3] = {t0sq, tl, tp};
      const cplx term = connected_s2<double>(p, -p, l, -l, g) * connected_s2<double>(l, -l, 0.0, 0.0, g) *
                        complete_homogeneous(m - 2, z2);
      acc += rule.w[i] * term.real();
    }
    val += b2 * b2 * acc / (2 * kPi);
  }
  return val;
}

void Wavefield::build_phi2() {
  const double g = params_.gamma_tot;
  const double a = 0.5 * g;
  const double p_far = 1e6 * g;
  p2_tail_ = p_far * p_far * t2_momentum(p_far);

  const auto rule = quad::tangent_half_rule(opts_.phi2_nodes, a);
  p2_nodes_ = rule.x;
  p2_weighted_.resize(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double p = rule.x[i];
    const double rem = t2_momentum(p) - p2_tail_ / (p * p + a * a);
    p2_weighted_[i] = rule.w[i] * rem / kPi;
  }

  const int n = static_cast<int>(std::ceil(opts_.table_range / opts_.table_step)) + 1;
  p2_table_.resize(n);
  for (int k = 0; k < n; ++k) p2_table_[k] = phi2_direct(k * opts_.table_step);
}

double Wavefield::phi2_direct(double dx) const {
  if (null_ || params_.num_atoms <= 0) return 0.0;
  const double x = std::abs(dx);
  const double a = 0.5 * params_.gamma_tot;
  double s = 0.0;
  for (std::size_t i = 0; i < p2_nodes_.size(); ++i) s += p2_weighted_[i] * std::cos(p2_nodes_[i] * x);
  return s + p2_tail_ * std::exp(-a * x) / (2 * a);
}

double Wavefield::phi2(double x1, double x2) const {
  if (null_ || params_.num_atoms <= 0) return 0.0;
  const double x = std::abs(x1 - x2);
  const double h = opts_.table_step;
  const int n = static_cast<int>(p2_table_.size());
  const double s = x / h;
  if (s > n - 1) return phi2_direct(x);
  int i0 = static_cast<int>(std::floor(s)) - 1;
  i0 = std::clamp(i0, 0, n - 4);
  // four-point Lagrange interpolation on nodes i0..i0+3
  double result = 0.0;
  for (int j = 0; j < 4; ++j) {
    double lj = 1.0;
    for (int k = 0; k < 4; ++k)
      if (k != j) lj *= (s - (i0 + k)) / double(j - k);
    result += lj * p2_table_[i0 + j];
  }
  return result;
}

std::array<Wavefield::Piece, 3> Wavefield::make_pieces(int nodes, bool loop_part) const {
  const double g = params_.gamma_tot;
  const auto rule = quad::tangent_rule(nodes, g);
  const std::size_t n = rule.size();
  auto amplitude = [&](double a, double b) {
    const Momenta3 p{a, b, -a - b};
    return loop_part ? loop_amplitudes_fixed(p, params_, opts_.loop_nodes) : tree_amplitude(p, params_);
  };
  // The diagram sums are symmetric in the outgoing momenta, so the value at
  // (u, v, -u-v) serves every piece and both orderings of (u, v).
  std::vector<cplx> amp(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) amp[i * n + j] = amp[j * n + i] = amplitude(rule.x[i], rule.x[j]);

  // Large-|v| behaviour A/v^2 + B/v^3 of each row, removed and transformed analytically.
  const double big = (loop_part ? 1e3 : 1e4) * g;
  std::vector<cplx> far_fwd(n), far_bwd(n);
  for (std::size_t i = 0; i < n; ++i) {
    far_fwd[i] = amplitude(rule.x[i], big);
    far_bwd[i] = amplitude(rule.x[i], -big);
  }

  auto weight = [g](double q) {
    const double d = q * q + g * g;
    return 1.0 / (d * d);
  };
  auto share = [&](int k, double u, double v) {
    Momenta3 p{};
    p[k] = u;
    p[(k + 1) % 3] = v;
    p[(k + 2) % 3] = -u - v;
    return weight(p[k]) / (weight(p[0]) + weight(p[1]) + weight(p[2]));
  };

  std::array<Piece, 3> pieces;
  const double kappa = g;
  for (int k = 0; k < 3; ++k) {
    Piece& pc = pieces[k];
    pc.kappa = kappa;
    pc.u = rule.x;
    pc.v = rule.x;
    pc.t.assign(n * n, cplx(0.0));
    pc.tail_a.assign(n, cplx(0.0));
    pc.tail_b.assign(n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rule.x[i];
      const cplx fwd = share(k, u, big) * far_fwd[i], bwd = share(k, u, -big) * far_bwd[i];
      const cplx a = 0.5 * big * big * (fwd + bwd);
      const cplx b = 0.5 * big * big * big * (fwd - bwd);
      pc.tail_a[i] = rule.w[i] * a;
      pc.tail_b[i] = rule.w[i] * b;
      for (std::size_t j = 0; j < n; ++j) {
        const double v = rule.x[j], d = v * v + kappa * kappa;
        pc.t[i * n + j] = rule.w[i] * rule.w[j] * (share(k, u, v) * amp[i * n + j] - (a / d + b * v / (d * d)));
      }
    }
  }
  return pieces;
}

void Wavefield::build_phi3() {
  if (params_.num_atoms <= 0) return;
  tree_ = make_pieces(opts_.phi3_nodes, false);
  if (opts_.loops && params_.num_atoms >= 2) loop_ = make_pieces(opts_.phi3_loop_nodes, true);
}

double Wavefield::transform(const std::array<Piece, 3>& pieces, double a, double c) const {
  // phase p0 a + p1 c written as u * alpha_k + v * beta_k in each piece
  const double alpha[3] = {a, c - a, -c};
  const double beta[3] = {c, -a, a - c};
  cplx total = 0.0;
  std::vector<cplx> ev;
  for (int k = 0; k < 3; ++k) {
    const Piece& pc = pieces[k];
    const std::size_t nu = pc.u.size(), nv = pc.v.size();
    if (nu == 0) continue;
    ev.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) ev[j] = std::polar(1.0, pc.v[j] * beta[k]);
    // transforms of 1/(v^2+K^2) and v/(v^2+K^2)^2
    const double kap = pc.kappa, ab = std::abs(beta[k]);
    const double ex = std::exp(-kap * ab);
    const cplx fa = kPi * ex / kap;
    const cplx fb = cplx(0.0, kPi * beta[k] * ex / (2 * kap));
    for (std::size_t i = 0; i < nu; ++i) {
      const cplx* row = &pc.t[i * nv];
      cplx s = pc.tail_a[i] * fa + pc.tail_b[i] * fb;
      for (std::size_t j = 0; j < nv; ++j) s += row[j] * ev[j];
      total += s * std::polar(1.0, pc.u[i] * alpha[k]);
    }
  }
  return total.real() / (4 * kPi * kPi);
}

double Wavefield::phi3_canonical(double a, double c) const {
  if (null_ || params_.num_atoms <= 0) return 0.0;
  double v = transform(tree_, a, c);
  if (opts_.loops && params_.num_atoms >= 2) v += transform(loop_, a, c);
  return v;
}

double Wavefield::phi3(double x1, double x2, double x3) const {
  std::array<double, 3> x{x1, x2, x3};
  std::sort(x.begin(), x.end());
  return phi3_canonical(x[2] - x[0], x[1] - x[0]);
}

double Wavefield::psi2(double x1, double x2) const { return t0_power(2) + phi2(x1, x2); }

double Wavefield::psi3(double x1, double x2, double x3) const {
  return t0_power(3) + t0_power(1) * (phi2(x1, x2) + phi2(x1, x3) + phi2(x2, x3)) + phi3(x1, x2, x3);
}

}  // namespace wqed

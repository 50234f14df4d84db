#include "wqed/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wqed/quadrature.hpp"
#include "wqed/scatter.hpp"

namespace wqed {

namespace {

cplx ipow(cplx z, int n) {
  cplx r(1.0);
  while (n > 0) {
    if (n & 1) r *= z;
    z *= z;
    n >>= 1;
  }
  return r;
}

cplx t_of(double k, const EnsembleParams& p) { return transmission<double>(k, p.beta, p.gamma_tot); }

}  // namespace

int beta_power(DiagramKind kind) {
  switch (kind) {
    case DiagramKind::ThreeVertex: return 3;
    case DiagramKind::FourVertex: return 4;
    case DiagramKind::LoopThreeTwo: return 5;
    case DiagramKind::LoopTwoTwoTwo: return 6;
  }
  return 0;
}

int vertex_count(DiagramKind kind) {
  switch (kind) {
    case DiagramKind::ThreeVertex: return 1;
    case DiagramKind::FourVertex: return 2;
    case DiagramKind::LoopThreeTwo: return 2;
    case DiagramKind::LoopTwoTwoTwo: return 3;
  }
  return 0;
}

GeometricSumResult geometric_sum(cplx a, cplx b, int m, double eps_deg) {
  if (m <= 0) return {cplx(0.0), false};
  const double scale = std::max(std::abs(a), std::abs(b));
  if (std::abs(a - b) <= eps_deg * scale) return {double(m) * ipow(a, m - 1), true};
  return {(ipow(a, m) - ipow(b, m)) / (a - b), false};
}

cplx complete_homogeneous(int n, std::span<const cplx> z) {
  if (n < 0 || z.empty()) return cplx(0.0);
  // h[k] over the variables processed so far
  std::vector<cplx> h(n + 1);
  h[0] = 1.0;
  for (int k = 1; k <= n; ++k) h[k] = h[k - 1] * z[0];
  for (std::size_t v = 1; v < z.size(); ++v)
    for (int k = 1; k <= n; ++k) h[k] += z[v] * h[k - 1];
  return h[n];
}

cplx complete_homogeneous3(int n, cplx x, cplx y, cplx z) {
  if (n < 0) return cplx(0.0);
  // Pivot so that (x, y) is the best separated pair.
  const double dxy = std::abs(x - y), dxz = std::abs(x - z), dyz = std::abs(y - z);
  if (dxz > dxy && dxz >= dyz) std::swap(y, z);
  else if (dyz > dxy && dyz > dxz) std::swap(x, z);
  const double scale = std::max({std::abs(x), std::abs(y), std::abs(z), 1e-300});
  const double sep_xy = std::abs(x - y) / scale;
  const double sep_min = std::min(std::abs(x - z), std::abs(y - z)) / scale;
  if (sep_xy * std::max(sep_min, 0.0) < 1e-4 || sep_xy < 1e-4) {
    const cplx zs[3] = {x, y, z};
    return complete_homogeneous(n, zs);
  }
  // h_n(x,y,z) = (h_{n+1}(x,z) - h_{n+1}(y,z)) / (x - y)
  const cplx hx = geometric_sum(x, z, n + 2, 0.0).value;
  const cplx hy = geometric_sum(y, z, n + 2, 0.0).value;
  return (hx - hy) / (x - y);
}

cplx t3v_amplitude(const Momenta3& p, const EnsembleParams& params) {
  const int m = params.num_atoms;
  if (m <= 0) return 0.0;
  const double b = params.beta;
  const cplx t0 = params.t0();
  const cplx out = t_of(p[0], params) * t_of(p[1], params) * t_of(p[2], params);
  const cplx s3 = connected_s3_resonant<double>(p, params.gamma_tot);
  return b * b * b * s3 * geometric_sum(out, t0 * t0 * t0, m).value;
}

cplx t4v_amplitude(const Momenta3& pin, const EnsembleParams& params, const std::array<int, 3>& perm) {
  const int m = params.num_atoms;
  if (m <= 1) return 0.0;
  const double p1 = pin[perm[0]], p2 = pin[perm[1]], p3 = pin[perm[2]];
  const double q2 = -p1;
  const double b2 = params.beta * params.beta;
  const double g = params.gamma_tot;
  const cplx t0 = params.t0();
  const cplx t1 = t_of(p1, params), tq = t_of(q2, params);
  const cplx t23 = t_of(p2, params) * t_of(p3, params);
  // sum_{j+m'+n = M-2} (t0^3)^j (t1 tq t0)^m' (t1 t2 t3)^n, times t1 t0
  const cplx sites = complete_homogeneous3(m - 2, t0 * t0 * t0, t1 * tq * t0, t1 * t23);
  const cplx first = b2 * connected_s2<double>(p1, q2, 0.0, 0.0, g);
  const cplx second = b2 * connected_s2<double>(p2, p3, q2, 0.0, g);
  return t1 * t0 * first * second * sites;
}

cplx t4v_sum(const Momenta3& p, const EnsembleParams& params) {
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  cplx s = 0.0;
  for (const auto& perm : perms) s += t4v_amplitude(p, params, perm);
  return s;
}

cplx tree_amplitude(const Momenta3& p, const EnsembleParams& params) {
  return t3v_amplitude(p, params) + t4v_sum(p, params);
}

// --- loop-order diagrams ----------------------------------------------------

VertexSequence route_vertices(const std::vector<std::vector<int>>& subsets) {
  VertexSequence seq;
  const int n = static_cast<int>(subsets.size());
  std::array<int, 3> last{-1, -1, -1};
  for (int r = 0; r < n; ++r)
    for (int v : subsets[r]) last[v] = r;

  auto final_of = [](int photon) {
    LinearMomentum f;
    (photon == 0 ? f.p0 : photon == 1 ? f.p1 : f.p2) = 1.0;
    return f;
  };
  auto add = [](LinearMomentum a, const LinearMomentum& b, double s) {
    a.l += s * b.l;
    a.p0 += s * b.p0;
    a.p1 += s * b.p1;
    a.p2 += s * b.p2;
    return a;
  };

  std::array<LinearMomentum, 3> cur{};
  seq.segments.push_back(cur);
  for (int r = 0; r < n; ++r) {
    VertexSequence::Vertex vx;
    vx.photons = subsets[r];
    LinearMomentum total{};
    std::vector<int> cont;
    for (int v : subsets[r]) {
      vx.in.push_back(cur[v]);
      total = add(total, cur[v], 1.0);
    }
    std::array<LinearMomentum, 3> next = cur;
    LinearMomentum rem = total;
    for (int v : subsets[r]) {
      if (last[v] == r) {
        next[v] = final_of(v);
        rem = add(rem, next[v], -1.0);
      } else {
        cont.push_back(v);
      }
    }
    if (cont.size() == 1) {
      next[cont[0]] = rem;
    } else if (cont.size() == 2) {
      if (seq.has_loop) throw std::logic_error("route_vertices: more than one loop");
      seq.has_loop = true;
      LinearMomentum l{};
      l.l = 1.0;
      next[cont[0]] = l;
      next[cont[1]] = add(rem, l, -1.0);
    } else if (cont.size() > 2) {
      throw std::logic_error("route_vertices: unsupported topology");
    }
    for (int v : subsets[r]) vx.out.push_back(next[v]);
    cur = next;
    seq.vertices.push_back(std::move(vx));
    seq.segments.push_back(cur);
  }
  const bool any_three = std::any_of(subsets.begin(), subsets.end(), [](const auto& s) { return s.size() == 3; });
  seq.kind = any_three ? DiagramKind::LoopThreeTwo : DiagramKind::LoopTwoTwoTwo;
  return seq;
}

const std::vector<VertexSequence>& loop_sequences() {
  static const std::vector<VertexSequence> all = [] {
    const std::vector<std::vector<int>> pairs{{0, 1}, {0, 2}, {1, 2}};
    const std::vector<int> triple{0, 1, 2};
    std::vector<VertexSequence> out;
    for (const auto& pr : pairs) {
      out.push_back(route_vertices({triple, pr}));
      out.push_back(route_vertices({pr, triple}));
    }
    for (const auto& a : pairs)
      for (const auto& b : pairs)
        for (const auto& c : pairs) {
          if (a == b && b == c) continue;
          out.push_back(route_vertices({a, b, c}));
        }
    return out;
  }();
  return all;
}

cplx sequence_amplitude(const VertexSequence& seq, const Momenta3& p, double loop,
                        const EnsembleParams& params) {
  const int n = static_cast<int>(seq.vertices.size());
  const int m = params.num_atoms;
  if (m < n) return 0.0;
  const double b = params.beta, g = params.gamma_tot;

  std::array<cplx, 4> z{};
  for (int s = 0; s <= n; ++s) {
    cplx prod = 1.0;
    for (int ph = 0; ph < 3; ++ph) prod *= t_of(seq.segments[s][ph](loop, p), params);
    z[s] = prod;
  }

  cplx amp = 1.0;
  for (int r = 0; r < n; ++r) {
    const auto& vx = seq.vertices[r];
    if (vx.photons.size() == 2) {
      amp *= b * b *
             connected_s2<double>(vx.out[0](loop, p), vx.out[1](loop, p), vx.in[0](loop, p),
                                  vx.in[1](loop, p), g);
      int spectator = 3 - vx.photons[0] - vx.photons[1];
      amp *= t_of(seq.segments[r][spectator](loop, p), params);
    } else {
      const Momenta3 out{vx.out[0](loop, p), vx.out[1](loop, p), vx.out[2](loop, p)};
      const Momenta3 in{vx.in[0](loop, p), vx.in[1](loop, p), vx.in[2](loop, p)};
      amp *= b * b * b * connected_s3<double>(out, in, g);
    }
  }
  return amp * complete_homogeneous(m - n, std::span<const cplx>(z.data(), n + 1));
}

cplx loop_integrand(const Momenta3& p, double loop, const EnsembleParams& params) {
  cplx s = 0.0;
  if (params.num_atoms < 2) return s;
  for (const auto& seq : loop_sequences()) s += sequence_amplitude(seq, p, loop, params);
  return s;
}

namespace {
double loop_scale(const Momenta3& p, double g) {
  const double pm = std::max({std::abs(p[0]), std::abs(p[1]), std::abs(p[2])});
  return 0.5 * g + 0.5 * pm;
}
}  // namespace

LoopResult loop_amplitudes(const Momenta3& p, const EnsembleParams& params, const LoopOptions& opts) {
  if (params.num_atoms < 2) return {};
  auto f = [&](double l) { return loop_integrand(p, l, params); };
  const auto r = quad::integrate_real_line<cplx>(f, loop_scale(p, params.gamma_tot), opts.rel_tol,
                                                 opts.abs_tol, opts.max_depth);
  const double inv2pi = 0.5 / std::numbers::pi;
  if (!r.converged)
    throw QuadratureError("loop integral did not converge", std::abs(r.value) * inv2pi, r.error * inv2pi);
  return {r.value * inv2pi, r.error * inv2pi};
}

namespace {

// Momentum combinations whose propagators depend on the loop momentum; each
// puts poles near l = -(p-part)/l-coefficient.
const std::vector<LinearMomentum>& loop_dependent_momenta() {
  static const std::vector<LinearMomentum> out = [] {
    std::vector<LinearMomentum> v;
    auto add = [&v](const LinearMomentum& m) {
      if (m.l == 0) return;
      const LinearMomentum n{1.0, m.p0 / m.l, m.p1 / m.l, m.p2 / m.l};
      for (const auto& e : v)
        if (e.p0 == n.p0 && e.p1 == n.p1 && e.p2 == n.p2) return;
      v.push_back(n);
    };
    for (const auto& seq : loop_sequences()) {
      for (const auto& seg : seq.segments)
        for (const auto& m : seg) add(m);
      for (const auto& vx : seq.vertices) {
        for (const auto& m : vx.in) add(m);
        for (const auto& m : vx.out) add(m);
      }
    }
    return v;
  }();
  return out;
}

}  // namespace

std::vector<double> loop_pole_centers(const Momenta3& p, double gamma_tot) {
  std::vector<double> c;
  for (const auto& m : loop_dependent_momenta()) c.push_back(-(m.p0 * p[0] + m.p1 * p[1] + m.p2 * p[2]));
  std::sort(c.begin(), c.end());
  // merge centres closer than the resonance width
  std::vector<double> merged;
  for (double x : c)
    if (merged.empty() || x - merged.back() > 0.25 * gamma_tot) merged.push_back(x);
  return merged;
}

cplx loop_amplitudes_fixed(const Momenta3& p, const EnsembleParams& params, int nodes) {
  if (params.num_atoms < 2) return 0.0;
  const double g = params.gamma_tot;
  const auto centers = loop_pole_centers(p, g);
  // partition of unity over the pole clusters, one tangent rule per cluster
  auto bump = [g](double x) {
    const double d = x * x + g * g;
    return 1.0 / (d * d);
  };
  cplx s = 0.0;
  for (double c : centers) {
    const auto rule = quad::tangent_rule(nodes, 0.5 * g, c);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double l = rule.x[i];
      double norm = 0.0;
      for (double d : centers) norm += bump(l - d);
      s += rule.w[i] * (bump(l - c) / norm) * loop_integrand(p, l, params);
    }
  }
  return s * (0.5 / std::numbers::pi);
}

}  // namespace wqed

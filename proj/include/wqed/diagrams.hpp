#pragma once

// Site-summed transport amplitudes of three-photon connected diagrams through
// an array of M atoms with resonant input photons.

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "wqed/params.hpp"

namespace wqed {

using cplx = std::complex<double>;
using Momenta3 = std::array<double, 3>;

enum class DiagramKind { ThreeVertex, FourVertex, LoopThreeTwo, LoopTwoTwoTwo };

struct DiagramSpec {
  DiagramKind kind = DiagramKind::ThreeVertex;
  std::array<int, 3> out_permutation{0, 1, 2};
  bool enabled = true;
};

/// Power of beta carried by a diagram kind (3, 4, 5, 6).
int beta_power(DiagramKind kind);
/// Number of interaction sites, i.e. n in the combinatorial factor C(M, n).
int vertex_count(DiagramKind kind);

struct GeometricSumResult {
  cplx value;
  bool degenerate = false;
};

/// sum_{j=0}^{M-1} A^{M-1-j} B^j in closed form. Falls back to M A^{M-1} when
/// |A - B| <= eps_deg * max(|A|, |B|).
GeometricSumResult geometric_sum(cplx a, cplx b, int m, double eps_deg = 1e-8);

/// Complete homogeneous symmetric polynomial h_N(z_0, ..., z_r): the sum over
/// all site placements of r ordered vertices among N + r sites, each
/// segment between vertices contributing the product of its transmissions.
/// Exact O(N r) recurrence.
cplx complete_homogeneous(int n, std::span<const cplx> z);

/// Three-variable h_N by divided differences of geometric sums, with the
/// recurrence as fallback for nearly coincident arguments.
cplx complete_homogeneous3(int n, cplx x, cplx y, cplx z);

/// Three-vertex diagram: one three-photon interaction somewhere in the array.
cplx t3v_amplitude(const Momenta3& p, const EnsembleParams& params);

/// One four-vertex diagram. `perm` maps diagram slots (first-vertex photon,
/// second-vertex pair) onto outgoing momenta: the photon leaving the first
/// vertex carries p[perm[0]], the second vertex emits p[perm[1]], p[perm[2]].
cplx t4v_amplitude(const Momenta3& p, const EnsembleParams& params,
                   const std::array<int, 3>& perm = {0, 1, 2});

/// Sum of the six permutation four-vertex diagrams.
cplx t4v_sum(const Momenta3& p, const EnsembleParams& params);

/// Sum of the tree-level (O(beta^2)) diagrams: T3v + sum_perm T4v.
cplx tree_amplitude(const Momenta3& p, const EnsembleParams& params);

// --- loop-order diagrams --------------------------------------------------

/// Affine function of the outgoing momenta and the loop momentum.
struct LinearMomentum {
  double l = 0, p0 = 0, p1 = 0, p2 = 0;
  double operator()(double loop, const Momenta3& p) const {
    return l * loop + p0 * p[0] + p1 * p[1] + p2 * p[2];
  }
};

/// A labelled sequence of interaction vertices at increasing sites, with the
/// momentum carried by each photon line in each segment.
struct VertexSequence {
  struct Vertex {
    std::vector<int> photons;            // 2 or 3 photon labels
    std::vector<LinearMomentum> in;      // per member, before the vertex
    std::vector<LinearMomentum> out;     // per member, after the vertex
  };
  std::vector<Vertex> vertices;
  /// segments[s][photon]: momentum between vertex s-1 and vertex s.
  std::vector<std::array<LinearMomentum, 3>> segments;
  DiagramKind kind = DiagramKind::LoopThreeTwo;
  bool has_loop = false;
};

/// Build the momentum routing for a sequence of photon subsets.
VertexSequence route_vertices(const std::vector<std::vector<int>>& subsets);

/// All connected labelled loop-order sequences: 3 of {123}->pair, 3 of
/// pair->{123}, 24 of three pair interactions.
const std::vector<VertexSequence>& loop_sequences();

/// Site-summed amplitude of one vertex sequence at a fixed loop momentum.
cplx sequence_amplitude(const VertexSequence& seq, const Momenta3& p, double loop,
                        const EnsembleParams& params);

/// Sum of all loop-order sequence amplitudes at fixed loop momentum.
cplx loop_integrand(const Momenta3& p, double loop, const EnsembleParams& params);

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate(estimate), error_bound(error_bound) {}
  double estimate;
  double error_bound;
};

struct LoopOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  int max_depth = 30;
};

struct LoopResult {
  cplx value;
  double error = 0;
};

/// Loop-order correction (1/2pi) int dl sum_seq amplitude(l), adaptive
/// Gauss-Kronrod on the tangent-mapped real line. Throws QuadratureError.
LoopResult loop_amplitudes(const Momenta3& p, const EnsembleParams& params,
                           const LoopOptions& opts = {});

/// Loop momenta near which the integrand has poles, merged within G/4.
std::vector<double> loop_pole_centers(const Momenta3& p, double gamma_tot);

/// Fixed-rule version used for dense momentum grids: `nodes` points per pole cluster.
cplx loop_amplitudes_fixed(const Momenta3& p, const EnsembleParams& params, int nodes);

}  // namespace wqed

#include "wqed/oracle.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "wqed/parallel.hpp"

namespace wqed::oracle {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::VectorXcd to_vec(const DenseOp& rho) {
  RowMat r = rho;
  return Eigen::Map<const Eigen::VectorXcd>(r.data(), r.size());
}

DenseOp from_vec(const Eigen::VectorXcd& v, int d) { return Eigen::Map<const RowMat>(v.data(), d, d); }

cplx trace_of(const DenseOp& m) { return m.diagonal().sum(); }

// Tr(a X a^dag) without forming the product.
double sandwich_trace(const SparseOp& a, const DenseOp& x) {
  const DenseOp ax = a * x;
  cplx s = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseOp::InnerIterator it(a, k); it; ++it) s += ax(it.row(), it.col()) * std::conj(it.value());
  return s.real();
}

DenseOp sandwich(const SparseOp& a, const DenseOp& x) {
  const DenseOp ax = a * x;
  return (a * ax.adjoint()).adjoint();
}

}  // namespace

// --- Hilbert space ------------------------------------------------------------

HilbertSpace::HilbertSpace(int num_atoms, int cap) : m_(num_atoms) {
  if (num_atoms < 0) throw InvalidParams("num_atoms must be >= 0");
  if (num_atoms > cap)
    throw CapacityError("master-equation oracle supports at most " + std::to_string(cap) + " atoms, got " +
                        std::to_string(num_atoms));
}

SparseOp HilbertSpace::lowering(int atom) const {
  const int d = dim(), bit = 1 << atom;
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int i = 0; i < d; ++i)
    if (i & bit) trip.emplace_back(i ^ bit, i, 1.0);
  SparseOp s(d, d);
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

SparseOp HilbertSpace::identity() const {
  SparseOp id(dim(), dim());
  id.setIdentity();
  return id;
}

// --- Liouvillian --------------------------------------------------------------

LiouvilleOperator::LiouvilleOperator(const EnsembleParams& params)
    : params_(params), space_(params.num_atoms), alpha_(0.0) {
  validate(params_);
  alpha_ = std::sqrt(params_.drive_power);
  const int m = space_.num_atoms(), d = space_.dim();
  const double gwg = params_.gamma_wg(), gl = params_.gamma_loss();
  const double sg = std::sqrt(gwg);
  const cplx I(0.0, 1.0);

  for (int k = 0; k < m; ++k) sigma_.push_back(space_.lowering(k));

  h_ = SparseOp(d, d);
  cjump_ = SparseOp(d, d);
  SparseOp loss(d, d);
  for (int k = 0; k < m; ++k) {
    const SparseOp sd = SparseOp(sigma_[k].adjoint());
    h_ += (sg * alpha_) * (sigma_[k] + sd);
    cjump_ += sg * sigma_[k];
    const SparseOp nk = sd * sigma_[k];
    loss += gl * nk;
  }
  // unidirectional exchange: atom n drives the downstream atom k > n
  for (int k = 0; k < m; ++k)
    for (int n = 0; n < k; ++n) {
      const SparseOp up_k = SparseOp(sigma_[k].adjoint()), up_n = SparseOp(sigma_[n].adjoint());
      const SparseOp fwd = up_k * sigma_[n], bwd = up_n * sigma_[k];
      const SparseOp hop = fwd - bwd;
      h_ += (-0.5 * I * gwg) * hop;
    }
  const SparseOp cdc = SparseOp(cjump_.adjoint()) * cjump_;
  const SparseOp decay = cdc + loss;
  heff_ = h_ - (0.5 * I) * decay;
  h_.makeCompressed();
  heff_.makeCompressed();
  cjump_.makeCompressed();
}

DenseOp LiouvilleOperator::apply(const DenseOp& rho) const {
  const cplx I(0.0, 1.0);
  const DenseOp k1 = heff_ * rho;
  const DenseOp k2 = (heff_ * rho.adjoint()).adjoint();
  DenseOp out = -I * (k1 - k2);
  out += sandwich(cjump_, rho);
  const double gl = params_.gamma_loss();
  const int d = dim();
  for (int k = 0; k < space_.num_atoms(); ++k) {
    const int bit = 1 << k;
    for (int j = 0; j < d; ++j) {
      if (j & bit) continue;
      for (int i = 0; i < d; ++i)
        if (!(i & bit)) out(i, j) += gl * rho(i | bit, j | bit);
    }
  }
  return out;
}

SparseOp LiouvilleOperator::assemble() const {
  const cplx I(0.0, 1.0);
  const SparseOp id = space_.identity();
  const SparseOp heff_conj = heff_.conjugate();
  const SparseOp cj_conj = cjump_.conjugate();
  Eigen::SparseMatrix<cplx> acc(dim() * dim(), dim() * dim());
  acc = Eigen::SparseMatrix<cplx>(Eigen::kroneckerProduct(heff_, id)) * (-I);
  acc += Eigen::SparseMatrix<cplx>(Eigen::kroneckerProduct(id, heff_conj)) * I;
  acc += Eigen::SparseMatrix<cplx>(Eigen::kroneckerProduct(cjump_, cj_conj));
  const double gl = params_.gamma_loss();
  for (const auto& s : sigma_) acc += Eigen::SparseMatrix<cplx>(Eigen::kroneckerProduct(s, s)) * gl;
  SparseOp out = acc;
  out.makeCompressed();
  return out;
}

double LiouvilleOperator::trace_preservation_residual() const {
  // The adjoint generator applied to the identity: i(H^dag - H) + C^dag C + sum gamma s^dag s.
  const cplx I(0.0, 1.0);
  const SparseOp diff = SparseOp(heff_.adjoint()) - heff_;
  const SparseOp cdc = SparseOp(cjump_.adjoint()) * cjump_;
  SparseOp r = I * diff;
  r += cdc;
  for (const auto& s : sigma_) {
    const SparseOp n = SparseOp(s.adjoint()) * s;
    r += params_.gamma_loss() * n;
  }
  double mx = 0.0;
  for (int k = 0; k < r.outerSize(); ++k)
    for (SparseOp::InnerIterator it(r, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  return mx;
}

LiouvilleOperator build_liouvillian(const EnsembleParams& params) { return LiouvilleOperator(params); }

// --- steady state -------------------------------------------------------------

double SteadyState::hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double SteadyState::trace_error() const { return std::abs(trace_of(rho) - 1.0); }

double SteadyState::min_eigenvalue() const {
  const DenseOp h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseOp> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace {

DenseOp rk4_step(const LiouvilleOperator& L, const DenseOp& r, double h) {
  const DenseOp k1 = L.apply(r);
  const DenseOp k2 = L.apply(r + (0.5 * h) * k1);
  const DenseOp k3 = L.apply(r + (0.5 * h) * k2);
  const DenseOp k4 = L.apply(r + h * k3);
  return r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

DenseOp direct_solve(const LiouvilleOperator& L) {
  const int d = L.dim(), D = d * d;
  const SparseOp S = L.assemble();
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(S.nonZeros() + d);
  for (int r = 1; r < S.outerSize(); ++r)
    for (SparseOp::InnerIterator it(S, r); it; ++it) trip.emplace_back(r, it.col(), it.value());
  for (int i = 0; i < d; ++i) trip.emplace_back(0, i * d + i, 1.0);
  Eigen::SparseMatrix<cplx> A(D, D);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw ConvergenceError("steady state: superoperator factorization failed (degenerate null space?)");
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(D);
  rhs(0) = 1.0;
  const Eigen::VectorXcd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw ConvergenceError("steady state: linear solve failed");
  return from_vec(x, d);
}

}  // namespace

SteadyState steady_state(const LiouvilleOperator& L, const SteadyStateOptions& opts) {
  SteadyState ss;
  const int d = L.dim();
  if (L.space().num_atoms() <= opts.direct_max_atoms) {
    ss.rho = direct_solve(L);
    ss.direct = true;
  } else {
    DenseOp rho = DenseOp::Zero(d, d);
    rho(0, 0) = 1.0;
    // explicit RK4 is stable for |lambda h| < 2.78; the fastest rate is about (M + 1) Gamma_tot
    const double h = std::min(opts.max_step, 2.0 / ((L.space().num_atoms() + 1) * L.params().gamma_tot));
    double t = 0.0, res = L.apply(rho).norm();
    while (res > opts.residual_tol) {
      for (int k = 0; k < 20; ++k) rho = rk4_step(L, rho, h);
      t += 20 * h;
      res = L.apply(rho).norm();
      if (!std::isfinite(res)) throw ConvergenceError("steady state: integration diverged");
      if (t > opts.max_time)
        throw ConvergenceError("steady state: residual " + std::to_string(res) + " above tolerance after t = " +
                               std::to_string(t));
    }
    ss.rho = rho;
  }
  ss.residual = L.apply(ss.rho).norm();
  return ss;
}

SparseOp output_field(const LiouvilleOperator& L) {
  const double sg = std::sqrt(L.params().gamma_wg());
  SparseOp a = L.drive_amplitude() * L.space().identity();
  for (int k = 0; k < L.space().num_atoms(); ++k) a += cplx(0.0, -sg) * L.space().lowering(k);
  a.makeCompressed();
  return a;
}

double equal_time_g2(const LiouvilleOperator& L, const SteadyState& ss) {
  const SparseOp a = output_field(L);
  const double n = sandwich_trace(a, ss.rho);
  const SparseOp aa = a * a;
  return sandwich_trace(aa, ss.rho) / (n * n);
}

// --- propagation --------------------------------------------------------------

Propagator::Propagator(const LiouvilleOperator& L, int dense_max_atoms, double max_step)
    : L_(L), dense_(L.space().num_atoms() <= dense_max_atoms), max_step_(max_step) {
  if (dense_) super_ = DenseOp(L.assemble());
}

DenseOp Propagator::advance(const DenseOp& rho, double dt) {
  if (dt < 0) throw std::invalid_argument("Propagator: negative time step");
  if (dt == 0.0) return rho;
  if (dense_) {
    const double key = std::round(dt * 1e10) / 1e10;
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, DenseOp((super_ * dt).exp())).first;
    return from_vec(it->second * to_vec(rho), L_.dim());
  }
  const int n = std::max(1, static_cast<int>(std::ceil(dt / max_step_)));
  const double h = dt / n;
  DenseOp r = rho;
  for (int k = 0; k < n; ++k) r = rk4_step(L_, r, h);
  return r;
}

// --- correlators --------------------------------------------------------------

namespace {

void check_times(const Eigen::VectorXd& t, const char* name) {
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (!(t(i) >= 0.0) || !std::isfinite(t(i))) throw InvalidParams(std::string(name) + " must be finite and >= 0");
    if (i > 0 && t(i) < t(i - 1)) throw InvalidParams(std::string(name) + " must be ascending");
  }
}

// Sorted values with near-duplicates (relative 1e-9) merged.
std::vector<double> merged(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > 1e-9 * std::max(1.0, std::abs(x))) out.push_back(x);
  return out;
}

std::size_t index_of(const std::vector<double>& grid, double x) {
  auto it = std::lower_bound(grid.begin(), grid.end(), x - 1e-9 * std::max(1.0, std::abs(x)));
  return static_cast<std::size_t>(it - grid.begin());
}

struct Prepared {
  LiouvilleOperator L;
  SteadyState ss;
  SparseOp a;
  double flux;
};

Prepared prepare(const EnsembleParams& params, const QrtOptions& opts) {
  LiouvilleOperator L(params);
  SteadyState ss = steady_state(L, opts.steady);
  SparseOp a = output_field(L);
  const double n = sandwich_trace(a, ss.rho);
  if (!(n > 0.0)) throw ConvergenceError("output photon flux vanishes; correlators undefined (drive_power = 0?)");
  return {std::move(L), std::move(ss), std::move(a), n};
}

// g2 at each merged time, propagating once along the sorted list.
std::vector<double> g2_along(const Prepared& p, Propagator& prop, const std::vector<double>& times) {
  DenseOp x = sandwich(p.a, p.ss.rho) / p.flux;
  std::vector<double> out;
  double prev = 0.0;
  for (double t : times) {
    x = prop.advance(x, t - prev);
    prev = t;
    out.push_back(sandwich_trace(p.a, x) / p.flux);
  }
  return out;
}

}  // namespace

CorrelationGrid qrt_g2(const EnsembleParams& params, const Eigen::VectorXd& tau, const QrtOptions& opts) {
  check_times(tau, "tau grid");
  const Prepared p = prepare(params, opts);
  Propagator prop(p.L, opts.dense_max_atoms, opts.max_step);
  std::vector<double> times(tau.data(), tau.data() + tau.size());
  const std::vector<double> vals = g2_along(p, prop, times);
  CorrelationGrid g;
  g.x = tau;
  g.x_name = "tau";
  g.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size());
  g.kind = CorrelationKind::G2;
  g.method = Method::Oracle;
  g.params = params;
  return g;
}

QrtG3 qrt_g3(const EnsembleParams& params, const Eigen::VectorXd& t1, const Eigen::VectorXd& t2,
             const QrtOptions& opts) {
  check_times(t1, "t1 grid");
  check_times(t2, "t2 grid");
  const Prepared p = prepare(params, opts);

  std::vector<double> all(t1.data(), t1.data() + t1.size());
  all.insert(all.end(), t2.data(), t2.data() + t2.size());
  const std::vector<double> T = merged(all);
  const std::size_t nt = T.size();

  // G[a][b - a]: detections at 0, T[a], T[b] with a <= b
  std::vector<std::vector<double>> G(nt);
  auto row = [&](std::size_t ia, const DenseOp& xa, Propagator& prop) {
    DenseOp y = sandwich(p.a, xa) / p.flux;
    std::vector<double>& out = G[ia];
    out.resize(nt - ia);
    double prev = T[ia];
    for (std::size_t ib = ia; ib < nt; ++ib) {
      y = prop.advance(y, T[ib] - prev);
      prev = T[ib];
      out[ib - ia] = sandwich_trace(p.a, y) / p.flux;
    }
  };

  const double bytes = 16.0 * p.L.dim() * p.L.dim() * nt;
  if (opts.threads > 1 && bytes < 1e9) {
    std::vector<DenseOp> xs(nt);
    {
      Propagator prop(p.L, opts.dense_max_atoms, opts.max_step);
      DenseOp x = sandwich(p.a, p.ss.rho) / p.flux;
      double prev = 0.0;
      for (std::size_t i = 0; i < nt; ++i) {
        x = prop.advance(x, T[i] - prev);
        prev = T[i];
        xs[i] = x;
      }
    }
    parallel_for(static_cast<int>(nt), opts.threads, [&](int i) {
      Propagator prop(p.L, opts.dense_max_atoms, opts.max_step);
      row(i, xs[i], prop);
    });
  } else {
    Propagator outer(p.L, opts.dense_max_atoms, opts.max_step);
    Propagator inner(p.L, opts.dense_max_atoms, opts.max_step);
    DenseOp x = sandwich(p.a, p.ss.rho) / p.flux;
    double prev = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
      x = outer.advance(x, T[i] - prev);
      prev = T[i];
      row(i, x, inner);
    }
  }

  // two-photon correlators at every lag the connected combination needs
  std::vector<double> lags(all);
  for (Eigen::Index i = 0; i < t1.size(); ++i)
    for (Eigen::Index j = 0; j < t2.size(); ++j) lags.push_back(std::abs(t1(i) - t2(j)));
  const std::vector<double> L2 = merged(lags);
  Propagator prop2(p.L, opts.dense_max_atoms, opts.max_step);
  const std::vector<double> g2v = g2_along(p, prop2, L2);
  auto g2_at = [&](double t) { return g2v[index_of(L2, t)]; };

  QrtG3 out;
  out.photon_flux = p.flux;
  for (CorrelationGrid* g : {&out.g3, &out.g3_connected}) {
    g->x = t1;
    g->y = t2;
    g->x_name = "t1";
    g->y_name = "t2";
    g->method = Method::Oracle;
    g->params = params;
    g->values.resize(t1.size(), t2.size());
  }
  out.g3.kind = CorrelationKind::G3;
  out.g3_connected.kind = CorrelationKind::G3Connected;
  for (Eigen::Index i = 0; i < t1.size(); ++i)
    for (Eigen::Index j = 0; j < t2.size(); ++j) {
      std::size_t a = index_of(T, t1(i)), b = index_of(T, t2(j));
      if (a > b) std::swap(a, b);
      const double v3 = G[a][b - a];
      out.g3.values(i, j) = v3;
      out.g3_connected.values(i, j) = 2.0 + v3 - g2_at(t1(i)) - g2_at(t2(j)) - g2_at(std::abs(t1(i) - t2(j)));
    }
  return out;
}

}  // namespace wqed::oracle

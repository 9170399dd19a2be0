#include "dspec/root_functions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dspec/classifier.hpp"
#include "dspec/linalg.hpp"

namespace dspec {

namespace {

constexpr double kNilpotentTol = 1e-5;
constexpr double kDeficiencyTol = 1e-6;

CMatrix kernel_abs(const CMatrix& m, double thr) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > thr) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

CMatrix range_basis(const CMatrix& m, double rel) {
  if (m.cols() == 0) return CMatrix(m.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel * std::max(1.0, s(0))) ++rank;
  return svd.matrixU().leftCols(rank);
}

std::vector<double> with_endpoint(const std::vector<double>& grid) {
  std::vector<double> pts(grid);
  if (pts.empty() || pts.back() < 1.0) pts.push_back(1.0);
  return pts;
}

double weight_sum(const DiracBVP& bvp) {
  double s = 0.0;
  for (const auto& b : bvp.weight.b) s += std::abs(b);
  return std::max(1.0, s);
}

CVector flatten_weighted(const CMatrix& u) {
  const Eigen::Index n = u.rows(), N = u.cols() - 1;
  CVector v(n * (N + 1));
  for (Eigen::Index i = 0; i <= N; ++i) {
    const double w = std::sqrt((i == 0 || i == N ? 0.5 : 1.0) / static_cast<double>(N));
    v.segment(i * n, n) = w * u.col(i);
  }
  return v;
}

}  // namespace

std::vector<double> uniform_grid(int N) {
  if (N < 1) throw PreconditionError("grid needs at least one interval");
  std::vector<double> x(N + 1);
  for (int i = 0; i <= N; ++i) x[i] = static_cast<double>(i) / N;
  x[N] = 1.0;
  return x;
}

cplx l2_inner(const CMatrix& u, const CMatrix& v) {
  const Eigen::Index N = u.cols() - 1;
  cplx s = 0.0;
  for (Eigen::Index i = 0; i <= N; ++i) s += (i == 0 || i == N ? 0.5 : 1.0) * v.col(i).dot(u.col(i));
  return s / static_cast<double>(N);
}

double l2_norm(const CMatrix& u) { return std::sqrt(std::max(0.0, l2_inner(u, u).real())); }

DerivativeStack derivative_stack(const DiracBVP& bvp, cplx lambda, int order, const std::vector<double>& grid,
                                 const RootControl& rc) {
  const int n = bvp.n();
  const double h = rc.derivative_radius > 0 ? rc.derivative_radius : 0.1 / weight_sum(bvp);
  const int K = rc.stencil > 0 ? rc.stencil : std::max(16, 4 * order);
  const auto pts = with_endpoint(grid);
  const std::size_t G = grid.size();
  DerivativeStack st;
  st.A.assign(order, CMatrix::Zero(n, n));
  st.Phi.assign(order, std::vector<CMatrix>(G, CMatrix::Zero(n, n)));
  for (int k = 0; k < K; ++k) {
    const double theta = 2 * kPi * k / K;
    const cplx mu = lambda + h * std::polar(1.0, theta);
    const auto prop = fundamental_matrix(bvp, mu, pts, rc.step);
    const CMatrix a = bvp.C() + bvp.D() * prop.matrices.back();
    for (int p = 0; p < order; ++p) {
      const cplx w = std::polar(1.0, -p * theta) / (static_cast<double>(K) * std::pow(h, p));
      st.A[p] += w * a;
      for (std::size_t i = 0; i < G; ++i) st.Phi[p][i] += w * prop.matrices[i];
    }
  }
  return st;
}

std::vector<RootChain> root_chains(const DiracBVP& bvp, cplx eigenvalue, int multiplicity,
                                   const std::vector<double>& grid, const RootControl& rc) {
  require_valid(bvp);
  if (multiplicity < 1) throw PreconditionError("multiplicity must be positive");
  const int n = bvp.n(), m = multiplicity, mn = n * m;
  const auto st = derivative_stack(bvp, eigenvalue, m, grid, rc);

  CMatrix T = CMatrix::Zero(mn, mn);
  for (int j = 0; j < m; ++j)
    for (int q = 0; q <= j; ++q) T.block(j * n, q * n, n, n) = st.A[j - q];
  Eigen::JacobiSVD<CMatrix> svd(T, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(mn - m) > kDeficiencyTol * std::max(1.0, s(0)))
    throw NumericalError("numerical rank deficiency: fewer than " + std::to_string(m) +
                         " independent root vectors at the given eigenvalue");
  const CMatrix Z = svd.matrixV().rightCols(m);

  CMatrix S = CMatrix::Zero(mn, mn);
  for (int j = 1; j < m; ++j) S.block(j * n, (j - 1) * n, n, n) = CMatrix::Identity(n, n);
  const CMatrix N = Z.adjoint() * S * Z;

  std::vector<CMatrix> powers{CMatrix::Identity(m, m)};
  std::vector<int> kerdim{0};
  while (kerdim.back() < m && static_cast<int>(powers.size()) <= m) {
    powers.push_back(powers.back() * N);
    kerdim.push_back(static_cast<int>(kernel_abs(powers.back(), kNilpotentTol).cols()));
  }
  const int L = static_cast<int>(kerdim.size()) - 1;
  kerdim.push_back(m);

  struct Head {
    CVector w;
    int len;
  };
  std::vector<Head> heads;
  for (int l = L; l >= 1; --l) {
    const int at_least = kerdim[l] - kerdim[l - 1];
    const int at_least_next = kerdim[l + 1] - kerdim[l];
    const int need = at_least - at_least_next;
    if (need <= 0) continue;
    const CMatrix X = kernel_abs(powers[l], kNilpotentTol);
    CMatrix Y = kernel_abs(powers[l - 1], kNilpotentTol);
    for (const auto& h : heads) {
      Y.conservativeResize(m, Y.cols() + 1);
      Y.col(Y.cols() - 1) = powers[h.len - l] * h.w;
    }
    const CMatrix Qy = range_basis(Y, 1e-8);
    const CMatrix P = CMatrix::Identity(m, m) - Qy * Qy.adjoint();
    Eigen::JacobiSVD<CMatrix> psvd(P * X, Eigen::ComputeFullV);
    for (int c = 0; c < need && c < X.cols(); ++c) {
      CVector w = X * psvd.matrixV().col(c);
      heads.push_back({w / w.norm(), l});
    }
  }

  std::vector<RootChain> chains;
  const std::size_t G = grid.size();
  for (const auto& h : heads) {
    const CVector v = Z * h.w;
    RootChain ch;
    ch.eigenvalue = eigenvalue;
    ch.x = grid;
    for (int j = 0; j < h.len; ++j) ch.coefficients.push_back(v.segment((m - h.len + j) * n, n));
    for (int j = 0; j < h.len; ++j) {
      CMatrix u = CMatrix::Zero(n, static_cast<Eigen::Index>(G));
      for (int p = 0; p <= j; ++p)
        for (std::size_t i = 0; i < G; ++i) u.col(static_cast<Eigen::Index>(i)) += st.Phi[p][i] * ch.coefficients[j - p];
      ch.functions.push_back(std::move(u));
    }
    const double scale = l2_norm(ch.functions.front());
    if (scale > 0) {
      for (auto& f : ch.functions) f /= scale;
      for (auto& c : ch.coefficients) c /= scale;
    }
    chains.push_back(std::move(ch));
  }

  const bool semisimple = std::all_of(chains.begin(), chains.end(), [](const RootChain& c) { return c.functions.size() == 1; });
  if (semisimple && chains.size() > 1) {
    const Eigen::Index k = static_cast<Eigen::Index>(chains.size());
    CMatrix gram(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) gram(a, b) = l2_inner(chains[b].functions[0], chains[a].functions[0]);
    const CMatrix Linv = gram.llt().matrixL().solve(CMatrix::Identity(k, k));
    std::vector<RootChain> ortho = chains;
    for (Eigen::Index a = 0; a < k; ++a) {
      ortho[a].functions[0].setZero();
      ortho[a].coefficients[0].setZero();
      for (Eigen::Index b = 0; b <= a; ++b) {
        const cplx w = std::conj(Linv(a, b));
        ortho[a].functions[0] += w * chains[b].functions[0];
        ortho[a].coefficients[0] += w * chains[b].coefficients[0];
      }
    }
    chains = std::move(ortho);
  }
  return chains;
}

std::vector<CMatrix> adjugate_span(const DiracBVP& bvp, cplx eigenvalue, int multiplicity,
                                   const std::vector<double>& grid, const RootControl& rc) {
  require_valid(bvp);
  const int n = bvp.n(), m = multiplicity;
  const double h = rc.derivative_radius > 0 ? rc.derivative_radius : 0.1 / weight_sum(bvp);
  const int K = rc.stencil > 0 ? rc.stencil : std::max(16, 4 * m);
  const auto pts = with_endpoint(grid);
  const Eigen::Index G = static_cast<Eigen::Index>(grid.size());
  std::vector<CMatrix> cand(static_cast<std::size_t>(m * n), CMatrix::Zero(n, G));
  for (int k = 0; k < K; ++k) {
    const double theta = 2 * kPi * k / K;
    const auto prop = fundamental_matrix(bvp, eigenvalue + h * std::polar(1.0, theta), pts, rc.step);
    const CMatrix adj = linalg::adjugate(bvp.C() + bvp.D() * prop.matrices.back());
    for (int p = 0; p < m; ++p) {
      const cplx w = std::polar(1.0, -p * theta) / (static_cast<double>(K) * std::pow(h, p));
      for (Eigen::Index i = 0; i < G; ++i) {
        const CMatrix U = prop.matrices[i] * adj;
        for (int j = 0; j < n; ++j) cand[p * n + j].col(i) += w * U.col(j);
      }
    }
  }
  CMatrix M(n * G, static_cast<Eigen::Index>(cand.size()));
  for (std::size_t c = 0; c < cand.size(); ++c) M.col(static_cast<Eigen::Index>(c)) = flatten_weighted(cand[c]);
  Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  std::vector<CMatrix> out;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (!(s(k) > rc.rank_tol * s(0))) break;
    CMatrix u(n, G);
    const CVector col = svd.matrixU().col(k);
    for (Eigen::Index i = 0; i < G; ++i) {
      const double w = std::sqrt((i == 0 || i == G - 1 ? 0.5 : 1.0) / static_cast<double>(G - 1));
      u.col(i) = col.segment(i * n, n) / w;
    }
    out.push_back(std::move(u));
  }
  return out;
}

ChainResidual chain_residual(const DiracBVP& bvp, const RootChain& chain) {
  ChainResidual r;
  const int n = bvp.n();
  const auto& x = chain.x;
  const Eigen::Index G = static_cast<Eigen::Index>(x.size());
  CMatrix Binv = CMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) Binv(j, j) = 1.0 / bvp.weight.b[j];
  double umax = 0.0;
  for (const auto& u : chain.functions) umax = std::max(umax, u.cwiseAbs().maxCoeff());
  const double scale = (1.0 + std::abs(chain.eigenvalue)) * std::max(umax, 1e-300);
  for (std::size_t p = 0; p < chain.functions.size(); ++p) {
    const CMatrix& u = chain.functions[p];
    for (Eigen::Index i = 1; i + 1 < G; ++i) {
      const CVector du = (u.col(i + 1) - u.col(i - 1)) / (x[i + 1] - x[i - 1]);
      CVector res = -kI * (Binv * du) + bvp.potential.at(x[i]) * u.col(i) - chain.eigenvalue * u.col(i);
      if (p > 0) res -= chain.functions[p - 1].col(i);
      r.ode = std::max(r.ode, res.norm() / scale);
    }
    const CVector bc = bvp.C() * u.col(0) + bvp.D() * u.col(G - 1);
    r.boundary = std::max(r.boundary, bc.norm() / std::max(l2_norm(u), 1e-300));
  }
  return r;
}

DiracBVP adjoint_bvp(const DiracBVP& bvp) {
  require_valid(bvp);
  const int n = bvp.n();
  const CMatrix Bs = bvp.weight.matrix().adjoint();
  CMatrix G(2 * n, n);
  G << Bs * bvp.C().adjoint(), -Bs * bvp.D().adjoint();
  const CMatrix Nb = linalg::null_space(G.adjoint(), 1e-12);
  if (Nb.cols() != n) throw NumericalError("adjoint boundary construction lost rank");
  const CMatrix rows = Nb.adjoint();
  DiracBVP adj;
  for (const auto& b : bvp.weight.b) adj.weight.b.push_back(std::conj(b));
  adj.potential = bvp.potential.adjoint();
  adj.boundary.C = rows.leftCols(n);
  adj.boundary.D = rows.rightCols(n);
  return adj;
}

double green_identity_defect(const DiracBVP& bvp, const DiracBVP& adjoint, int pairs, std::uint64_t seed) {
  const int n = bvp.n();
  const CMatrix K1 = linalg::null_space(bvp.boundary.compound(), 1e-12);
  const CMatrix K2 = linalg::null_space(adjoint.boundary.compound(), 1e-12);
  CMatrix Binv = CMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) Binv(j, j) = 1.0 / bvp.weight.b[j];
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto rnd = [&](Eigen::Index k) {
    CVector v(k);
    for (Eigen::Index i = 0; i < k; ++i) v(i) = cplx(nd(rng), nd(rng));
    return v;
  };
  double worst = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const CVector y = K1 * rnd(K1.cols());
    const CVector g = K2 * rnd(K2.cols());
    const cplx lhs = g.tail(n).dot(Binv * y.tail(n));
    const cplx rhs = g.head(n).dot(Binv * y.head(n));
    worst = std::max(worst, std::abs(lhs - rhs) / (linalg::spectral_norm(Binv) * y.norm() * g.norm()));
  }
  return worst;
}

namespace {

struct Flat {
  std::vector<const CMatrix*> f;
  std::vector<cplx> ev;
};

Flat flatten(const std::vector<RootChain>& chains) {
  Flat out;
  for (const auto& c : chains)
    for (const auto& u : c.functions) {
      out.f.push_back(&u);
      out.ev.push_back(c.eigenvalue);
    }
  return out;
}

bool same_value(cplx a, cplx b) { return std::abs(a - b) <= 1e-6 * (1.0 + std::abs(a)); }

GramReport gram_report(const Flat& rows, const Flat& cols, bool conjugate_cols) {
  GramReport g;
  const Eigen::Index R = static_cast<Eigen::Index>(rows.f.size()), C = static_cast<Eigen::Index>(cols.f.size());
  g.gram.resize(R, C);
  g.row_eigenvalues = rows.ev;
  g.col_eigenvalues = cols.ev;
  std::vector<double> rn(R), cn(C);
  for (Eigen::Index a = 0; a < R; ++a) rn[a] = l2_norm(*rows.f[a]);
  for (Eigen::Index b = 0; b < C; ++b) cn[b] = l2_norm(*cols.f[b]);
  for (Eigen::Index a = 0; a < R; ++a)
    for (Eigen::Index b = 0; b < C; ++b) {
      g.gram(a, b) = l2_inner(*rows.f[a], *cols.f[b]);
      const double v = std::abs(g.gram(a, b)) / std::max(rn[a] * cn[b], 1e-300);
      const cplx mu = conjugate_cols ? std::conj(cols.ev[b]) : cols.ev[b];
      if (!same_value(rows.ev[a], mu)) g.max_cross = std::max(g.max_cross, v);
      if (a != b) g.max_offdiag = std::max(g.max_offdiag, v);
    }
  std::vector<cplx> distinct;
  for (cplx l : rows.ev)
    if (std::none_of(distinct.begin(), distinct.end(), [&](cplx d) { return same_value(d, l); })) distinct.push_back(l);
  for (cplx l : distinct) {
    std::vector<Eigen::Index> ri, ci;
    for (Eigen::Index a = 0; a < R; ++a)
      if (same_value(rows.ev[a], l)) ri.push_back(a);
    for (Eigen::Index b = 0; b < C; ++b)
      if (same_value(l, conjugate_cols ? std::conj(cols.ev[b]) : cols.ev[b])) ci.push_back(b);
    if (ri.empty() || ri.size() != ci.size()) {
      g.block_conditions.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    CMatrix blk(static_cast<Eigen::Index>(ri.size()), static_cast<Eigen::Index>(ci.size()));
    for (std::size_t a = 0; a < ri.size(); ++a)
      for (std::size_t b = 0; b < ci.size(); ++b)
        blk(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = g.gram(ri[a], ci[b]) / (rn[ri[a]] * cn[ci[b]]);
    g.block_conditions.push_back(linalg::condition_number(blk));
  }
  return g;
}

CMatrix trig_test(int n, const std::vector<double>& x, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix f = CMatrix::Zero(n, static_cast<Eigen::Index>(x.size()));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < 4; ++k) {
      const cplx a(nd(rng), nd(rng)), b(nd(rng), nd(rng));
      for (std::size_t i = 0; i < x.size(); ++i)
        f(j, static_cast<Eigen::Index>(i)) += a * std::cos(kPi * k * x[i]) + b * std::sin(kPi * k * x[i]);
    }
  return f;
}

CMatrix reflection_test(const IncompletenessWitness& w, int n, const std::vector<double>& x, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVector v(n);
  for (int j = 0; j < n; ++j) v(j) = cplx(nd(rng), nd(rng));
  const double eps = w.epsilon;
  auto bump = [&](double s) { return s > 0 && s < eps ? std::pow(std::sin(kPi * s / eps), 2) : 0.0; };
  const CVector back = -w.A.adjoint() * v;
  CMatrix f = CMatrix::Zero(n, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    if (x[i] < eps) f.col(c) += bump(x[i]) * v;
    if (x[i] > 1.0 - eps) f.col(c) += bump(1.0 - x[i]) * back;
  }
  return f;
}

}  // namespace

GramReport minimality_gram(const std::vector<RootChain>& chains, const std::vector<RootChain>& adjoint_chains) {
  return gram_report(flatten(chains), flatten(adjoint_chains), true);
}

GramReport self_gram(const std::vector<RootChain>& chains) {
  const auto f = flatten(chains);
  return gram_report(f, f, false);
}

std::vector<double> projection_residuals(const std::vector<RootChain>& chains, const std::vector<CMatrix>& tests) {
  const auto flat = flatten(chains);
  std::vector<double> out;
  if (tests.empty()) return out;
  const Eigen::Index rows = tests.front().size();
  CMatrix M(rows, static_cast<Eigen::Index>(flat.f.size()));
  for (std::size_t c = 0; c < flat.f.size(); ++c) M.col(static_cast<Eigen::Index>(c)) = flatten_weighted(*flat.f[c]);
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod;
  if (M.cols() > 0) cod.compute(M);
  for (const auto& t : tests) {
    const CVector f = flatten_weighted(t);
    const double fn = f.norm();
    if (fn == 0.0) {
      out.push_back(0.0);
      continue;
    }
    if (M.cols() == 0) {
      out.push_back(1.0);
      continue;
    }
    const CVector r = f - M * cod.solve(f);
    out.push_back(r.norm() / fn);
  }
  return out;
}

DefectReport defect_probe(const DiracBVP& bvp, const Rect& region, int n_test, const DefectControl& dc) {
  require_valid(bvp);
  const auto x = uniform_grid(dc.grid);
  const auto slice = locate_eigenvalues(bvp, region, dc.tol, dc.roots.step);
  std::vector<RootChain> chains;
  for (const auto& e : slice.eigenvalues) {
    auto c = root_chains(bvp, e.value, e.multiplicity, x, dc.roots);
    chains.insert(chains.end(), c.begin(), c.end());
  }
  std::mt19937_64 rng(dc.seed);
  std::vector<CMatrix> tests;
  std::optional<IncompletenessWitness> w;
  if (dc.kind == ProbeKind::reflection) {
    w = reflection_witness(bvp);
    if (!w) throw PreconditionError("reflection probe requires a reflection-symmetric boundary problem");
  }
  for (int t = 0; t < n_test; ++t)
    tests.push_back(dc.kind == ProbeKind::reflection ? reflection_test(*w, bvp.n(), x, rng) : trig_test(bvp.n(), x, rng));
  DefectReport rep;
  for (const auto& c : chains) rep.root_functions += static_cast<int>(c.functions.size());
  rep.residuals = projection_residuals(chains, tests);
  for (double r : rep.residuals) rep.mean_residual += r / std::max<std::size_t>(1, rep.residuals.size());
  return rep;
}

}  // namespace dspec

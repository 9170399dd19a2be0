#include "dspec/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dspec/linalg.hpp"

namespace dspec {

namespace {

struct Setup {
  std::vector<double> x;
  std::vector<CMatrix> phi, phi_inv;
  CMatrix iB, C, DPhi1;
  Eigen::PartialPivLU<CMatrix> M;
  double condition = 0.0;
};

Setup make_setup(const DiracBVP& bvp, cplx lambda, std::vector<double> x, const StepControl& ctrl) {
  require_valid(bvp);
  Setup s;
  s.x = x;
  if (x.empty() || x.back() < 1.0) x.push_back(1.0);
  const auto prop = fundamental_matrix(bvp, lambda, x, ctrl);
  const CMatrix& phi1 = prop.matrices.back();
  const CMatrix m = bvp.C() + bvp.D() * phi1;
  s.condition = linalg::condition_number(m);
  if (!(s.condition <= kMaxCharCondition))
    throw NumericalError("lambda too close to the spectrum: cond(C + D Phi(1)) = " + std::to_string(s.condition));
  s.M = m.partialPivLu();
  s.C = bvp.C();
  s.DPhi1 = bvp.D() * phi1;
  s.iB = kI * bvp.weight.matrix();
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    s.phi.push_back(prop.matrices[i]);
    s.phi_inv.push_back(prop.matrices[i].partialPivLu().inverse());
  }
  return s;
}

CMatrix lower_branch(const Setup& s, std::size_t ix, std::size_t it) {
  return s.phi[ix] * s.M.solve(s.C * s.phi_inv[it] * s.iB);
}

CMatrix upper_branch(const Setup& s, std::size_t ix, std::size_t it) {
  return -s.phi[ix] * s.M.solve(s.DPhi1 * s.phi_inv[it] * s.iB);
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::size_t index_of(const std::vector<double>& v, double x) {
  return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
}

void check_unit(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw PreconditionError("abscissa outside [0,1]");
}

// Trapezoid Nyström operator A = W^{1/2} G W^{1/2} applied in O(N).
class Nystrom {
public:
  Nystrom(const DiracBVP& bvp, cplx lambda, int N, const StepControl& ctrl)
      : n_(bvp.n()), N_(N), s_(make_setup(bvp, lambda, grid(N), ctrl)) {
    for (int i = 0; i <= N; ++i) sw_.push_back(std::sqrt((i == 0 || i == N ? 0.5 : 1.0) / N));
    Minv_ = s_.M.inverse();
    left_c_ = Minv_ * s_.C;
    left_d_ = Minv_ * s_.DPhi1;
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(n_) * (N_ + 1); }

  CVector apply(const CVector& v) const {
    std::vector<CVector> g(N_ + 1);
    CVector total = CVector::Zero(n_);
    for (int j = 0; j <= N_; ++j) {
      g[j] = s_.phi_inv[j] * (s_.iB * (sw_[j] * v.segment(j * n_, n_)));
      total += g[j];
    }
    CVector out(size());
    CVector prefix = CVector::Zero(n_);
    for (int i = 0; i <= N_; ++i) {
      const CVector P = prefix + 0.5 * g[i];
      const CVector S = total - prefix - 0.5 * g[i];
      out.segment(i * n_, n_) = sw_[i] * (s_.phi[i] * (left_c_ * P - left_d_ * S));
      prefix += g[i];
    }
    return out;
  }

  CVector apply_adjoint(const CVector& v) const {
    std::vector<CVector> h(N_ + 1);
    CVector total = CVector::Zero(n_);
    for (int i = 0; i <= N_; ++i) {
      h[i] = s_.phi[i].adjoint() * (sw_[i] * v.segment(i * n_, n_));
      total += h[i];
    }
    const CMatrix lc = left_c_.adjoint(), ld = left_d_.adjoint(), iBs = s_.iB.adjoint();
    CVector out(size());
    CVector prefix = CVector::Zero(n_);
    for (int j = 0; j <= N_; ++j) {
      const CVector L = prefix + 0.5 * h[j];
      const CVector R = total - prefix - 0.5 * h[j];
      out.segment(j * n_, n_) = sw_[j] * (iBs * (s_.phi_inv[j].adjoint() * (lc * R - ld * L)));
      prefix += h[j];
    }
    return out;
  }

  static std::vector<double> grid(int N) {
    std::vector<double> x(N + 1);
    for (int i = 0; i <= N; ++i) x[i] = static_cast<double>(i) / N;
    return x;
  }

private:
  int n_, N_;
  Setup s_;
  std::vector<double> sw_;
  CMatrix Minv_, left_c_, left_d_;
};

CMatrix orth(const CMatrix& y) {
  Eigen::HouseholderQR<CMatrix> qr(y);
  return qr.householderQ() * CMatrix::Identity(y.rows(), y.cols());
}

}  // namespace

GreenEvaluation green_function(const DiracBVP& bvp, cplx lambda, const std::vector<std::pair<double, double>>& pairs,
                               const StepControl& ctrl) {
  std::vector<double> xs;
  for (const auto& [x, t] : pairs) {
    check_unit(x);
    check_unit(t);
    xs.push_back(x);
    xs.push_back(t);
  }
  xs = sorted_unique(xs);
  const Setup s = make_setup(bvp, lambda, xs, ctrl);
  GreenEvaluation g;
  g.lambda = lambda;
  g.pairs = pairs;
  g.condition = s.condition;
  for (const auto& [x, t] : pairs) {
    const std::size_t ix = index_of(xs, x), it = index_of(xs, t);
    g.values.push_back(t <= x ? lower_branch(s, ix, it) : upper_branch(s, ix, it));
  }
  return g;
}

std::vector<CMatrix> green_jump(const DiracBVP& bvp, cplx lambda, const std::vector<double>& xs,
                                const StepControl& ctrl) {
  for (double x : xs) check_unit(x);
  const auto grid = sorted_unique(xs);
  const Setup s = make_setup(bvp, lambda, grid, ctrl);
  std::vector<CMatrix> out;
  for (double x : xs) {
    const std::size_t i = index_of(grid, x);
    out.push_back(lower_branch(s, i, i) - upper_branch(s, i, i));
  }
  return out;
}

CMatrix apply_resolvent(const DiracBVP& bvp, cplx lambda, const CMatrix& f, const StepControl& ctrl) {
  const int n = bvp.n();
  if (f.rows() != n || f.cols() < 2) throw PreconditionError("f must be n×(N+1) with N ≥ 1");
  const int N = static_cast<int>(f.cols()) - 1;
  const Setup s = make_setup(bvp, lambda, Nystrom::grid(N), ctrl);
  std::vector<CVector> I(N + 1);
  I[0] = CVector::Zero(n);
  CVector gprev = s.phi_inv[0] * (s.iB * f.col(0));
  for (int i = 1; i <= N; ++i) {
    const CVector g = s.phi_inv[i] * (s.iB * f.col(i));
    I[i] = I[i - 1] + (0.5 / N) * (gprev + g);
    gprev = g;
  }
  CMatrix y(n, N + 1);
  for (int i = 0; i <= N; ++i) y.col(i) = s.phi[i] * s.M.solve(s.C * I[i] - s.DPhi1 * (I[N] - I[i]));
  return y;
}

cplx trace_formula_diff(const DiracBVP& bvp1, const DiracBVP& bvp2, cplx lambda, int N, const StepControl& ctrl) {
  if (bvp1.n() != bvp2.n()) throw PreconditionError("trace formula needs problems of equal size");
  if (N < 2) throw PreconditionError("N must be at least 2");
  const auto x = Nystrom::grid(N);
  const Setup s1 = make_setup(bvp1, lambda, x, ctrl);
  const Setup s2 = make_setup(bvp2, lambda, x, ctrl);
  std::vector<cplx> f(N + 1);
  for (int i = 0; i <= N; ++i) f[i] = (lower_branch(s1, i, i) - lower_branch(s2, i, i)).trace();
  return linalg::simpson(f);
}

cplx nystrom_trace(const DiracBVP& bvp, cplx lambda, int N, const StepControl& ctrl) {
  if (N < 1) throw PreconditionError("N must be positive");
  const Setup s = make_setup(bvp, lambda, Nystrom::grid(N), ctrl);
  cplx t = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double w = (i == 0 || i == N ? 0.5 : 1.0) / N;
    t += w * 0.5 * (lower_branch(s, i, i) + upper_branch(s, i, i)).trace();
  }
  return t;
}

void assign_series(SValueProfile& p) {
  const std::size_t r = p.weights.size();
  p.series.assign(r, {});
  p.normalized.assign(r, {});
  for (double s : p.values) {
    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < r; ++j) {
      const double pred = p.weights[j] / (kPi * static_cast<double>(p.series[j].size() + 1));
      const double err = std::abs(std::log(s / pred));
      if (err < best_err) {
        best_err = err;
        best = j;
      }
    }
    p.series[best].push_back(s);
    const double k = static_cast<double>(p.series[best].size());
    p.normalized[best].push_back(s * kPi * k / p.weights[best]);
  }
}

SValueProfile svalue_profile(const DiracBVP& bvp, cplx lambda, int N, const SValueControl& sc) {
  if (N < 256) throw PreconditionError("svalue_profile needs N >= 256");
  const Nystrom A(bvp, lambda, N, sc.step);
  const Eigen::Index dim = A.size();
  const Eigen::Index ell = std::min<Eigen::Index>(dim, std::max(2 * sc.count, sc.count + 60));

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> nd;
  CMatrix Y(dim, ell);
  for (Eigen::Index c = 0; c < ell; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) Y(r, c) = cplx(nd(rng), nd(rng));
  auto apply = [&](const CMatrix& X, bool adjoint) {
    CMatrix out(dim, X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) out.col(c) = adjoint ? A.apply_adjoint(X.col(c)) : A.apply(X.col(c));
    return out;
  };
  CMatrix Q = orth(apply(Y, false));
  for (int it = 0; it < sc.power_iterations; ++it) Q = orth(apply(orth(apply(Q, true)), false));
  const CMatrix Bt = apply(Q, true);  // (Q* A)*
  Eigen::BDCSVD<CMatrix> svd(Bt);
  const auto& sv = svd.singularValues();

  SValueProfile p;
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(sc.count, sv.size()); ++k) p.values.push_back(sv(k));
  for (const auto& b : bvp.weight.b) p.weights.push_back(std::abs(b));
  std::sort(p.weights.begin(), p.weights.end());
  assign_series(p);
  return p;
}

}  // namespace dspec

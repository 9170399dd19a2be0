#include "dspec/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dspec/linalg.hpp"

namespace dspec {

namespace {

constexpr double kNodeTol = 1e-15;
constexpr double kMarchGrowth = 2.0;
constexpr double kMarchRenormalize = 8.0;

double potential_scale(const PotentialField& q) {
  double m = 0.0;
  for (const auto& s : q.samples()) m = std::max(m, linalg::spectral_norm(s));
  return m;
}

CMatrix dirac_generator(const DiracBVP& bvp, cplx lambda, double x) {
  const int n = bvp.n();
  CMatrix a = -bvp.potential.at(x);
  a.diagonal().array() += lambda;
  for (int j = 0; j < n; ++j) a.row(j) *= kI * bvp.weight.b[j];
  return a;
}

std::vector<double> merged_nodes(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  all.push_back(0.0);
  all.push_back(1.0);
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double x : all)
    if (out.empty() || x - out.back() > kNodeTol) out.push_back(x);
  return out;
}

}  // namespace

StepCapExceeded::StepCapExceeded(long req, double est)
    : NumericalError("step cap exceeded: " + std::to_string(req) +
                     " steps requested, achieved error estimate " + std::to_string(est)),
      requested(req),
      error_estimate(est) {}

namespace {

// Calls step(E, x_end) for consecutive step propagators over [0,1]. Constant pieces are split so that
// |A|·h stays below max_growth when max_growth > 0; otherwise each constant piece is one step.
template <class Step>
long walk_steps(const Generator& A, const std::vector<double>& nodes, bool piecewise_constant, long steps_per_unit,
                double max_growth, Step&& step) {
  static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
  static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
  static const double k3 = std::sqrt(3.0) / 12.0;
  long steps = 0;
  for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
    const double a = nodes[s], b = nodes[s + 1];
    const double len = b - a;
    if (piecewise_constant) {
      const CMatrix gen = A(0.5 * (a + b));
      long k = 1;
      if (max_growth > 0) k = std::max(1L, static_cast<long>(std::ceil(gen.norm() * len / max_growth)));
      const CMatrix E = linalg::expm(gen * (len / static_cast<double>(k)));
      for (long i = 0; i < k; ++i) step(E, i + 1 == k ? b : a + len * static_cast<double>(i + 1) / k);
      steps += k;
    } else {
      const long k = std::max(1L, static_cast<long>(std::ceil(len * static_cast<double>(steps_per_unit))));
      const double h = len / static_cast<double>(k);
      for (long i = 0; i < k; ++i) {
        const double x = a + static_cast<double>(i) * h;
        const CMatrix A1 = A(x + c1 * h);
        const CMatrix A2 = A(x + c2 * h);
        const CMatrix omega = (0.5 * h) * (A1 + A2) + (k3 * h * h) * (A2 * A1 - A1 * A2);
        step(linalg::expm(omega), i + 1 == k ? b : x + h);
      }
      steps += k;
    }
  }
  return steps;
}

}  // namespace

std::vector<CMatrix> integrate_linear(const Generator& A, int n, const std::vector<double>& breakpoints,
                                      bool piecewise_constant, const std::vector<double>& x_points,
                                      long steps_per_unit, StepStats* stats) {
  const auto nodes = merged_nodes(breakpoints, x_points);
  std::vector<CMatrix> out(x_points.size());
  std::size_t next = 0;
  auto emit = [&](double x, const CMatrix& Y) {
    while (next < x_points.size() && x_points[next] <= x + kNodeTol) out[next++] = Y;
  };
  CMatrix Y = CMatrix::Identity(n, n);
  emit(0.0, Y);
  const long steps = walk_steps(A, nodes, piecewise_constant, steps_per_unit, 0.0, [&](const CMatrix& E, double x) {
    Y = E * Y;
    if (next < x_points.size() && x_points[next] <= x + kNodeTol) emit(x, Y);
  });
  emit(1.0, Y);
  if (stats) stats->steps += steps;
  return out;
}

long step_budget(const DiracBVP& bvp, cplx lambda, const StepControl& ctrl) {
  const double rate = (std::abs(lambda) + potential_scale(bvp.potential)) * bvp.weight.max_abs();
  const long base = std::max(16, ctrl.base_steps);
  return base * static_cast<long>(std::ceil(1.0 + rate / kPi));
}

Propagation fundamental_matrix(const DiracBVP& bvp, cplx lambda, const std::vector<double>& x_points,
                               const StepControl& ctrl) {
  for (std::size_t i = 0; i < x_points.size(); ++i) {
    if (!(x_points[i] >= 0.0 && x_points[i] <= 1.0))
      throw PreconditionError("x_points must lie in [0,1]");
    if (i > 0 && x_points[i] < x_points[i - 1]) throw PreconditionError("x_points must be ascending");
  }
  const int n = bvp.n();
  const auto gen = [&](double x) { return dirac_generator(bvp, lambda, x); };
  const auto breaks = bvp.potential.breakpoints();
  const bool pc = bvp.potential.piecewise_constant();
  const long budget = step_budget(bvp, lambda, ctrl);

  Propagation p;
  p.lambda = lambda;
  p.x_points = x_points;
  if (!pc && budget > ctrl.max_steps) {
    StepStats st;
    const auto fine = integrate_linear(gen, n, breaks, pc, {1.0}, ctrl.max_steps, &st);
    const auto coarse = integrate_linear(gen, n, breaks, pc, {1.0}, ctrl.max_steps / 2, &st);
    const double est = (fine[0] - coarse[0]).norm() / (15.0 * fine[0].norm());
    throw StepCapExceeded(budget, est);
  }
  p.matrices = integrate_linear(gen, n, breaks, pc, x_points, budget, &p.step_stats);
  if (ctrl.estimate_error && !pc) {
    StepStats st;
    const auto fine = integrate_linear(gen, n, breaks, pc, {1.0}, budget, &st);
    const auto coarse = integrate_linear(gen, n, breaks, pc, {1.0}, std::max(1L, budget / 2), &st);
    p.step_stats.error_estimate = (fine[0] - coarse[0]).norm() / (15.0 * fine[0].norm());
  }
  return p;
}

CMatrix monodromy(const DiracBVP& bvp, cplx lambda, const StepControl& ctrl) {
  return fundamental_matrix(bvp, lambda, {1.0}, ctrl).matrices.front();
}

cplx liouville_determinant(const DiracBVP& bvp, cplx lambda) {
  const CMatrix q = bvp.potential.integral();
  cplx trbq = 0.0;
  for (int j = 0; j < bvp.n(); ++j) trbq += bvp.weight.b[j] * q(j, j);
  return std::exp(kI * bvp.weight.trace() * lambda - kI * trbq);
}

CMatrix char_matrix(const DiracBVP& bvp, cplx lambda, const StepControl& ctrl) {
  return bvp.C() + bvp.D() * monodromy(bvp, lambda, ctrl);
}

namespace {

std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) return out;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

// k-th compound: the matrix of k×k minors indexed by row and column subsets.
CMatrix compound(const CMatrix& E, const std::vector<std::vector<int>>& subsets) {
  const int m = static_cast<int>(subsets.size());
  const int k = static_cast<int>(subsets.front().size());
  if (k == E.rows()) return CMatrix::Constant(1, 1, linalg::det(E));
  if (k == 1) return E;
  CMatrix out(m, m), sub(k, k);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = E(subsets[r][i], subsets[c][j]);
      out(r, c) = linalg::det(sub);
    }
  return out;
}

int permutation_sign(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    while (p[i] != static_cast<int>(i)) {
      std::swap(p[i], p[p[i]]);
      sign = -sign;
    }
  return sign;
}

}  // namespace

cplx char_determinant(const DiracBVP& bvp, cplx lambda, const StepControl& ctrl) {
  // Cauchy-Binet: Δ = Σ_S det((C D)_S) det([I; Φ]_S). Each compound of Φ is carried with its own scale,
  // so minors of different orders never share one floating-point range.
  const int n = bvp.n();
  const auto gen = [&](double x) { return dirac_generator(bvp, lambda, x); };
  const bool pc = bvp.potential.piecewise_constant();
  const long budget = step_budget(bvp, lambda, ctrl);
  if (!pc && budget > ctrl.max_steps) monodromy(bvp, lambda, ctrl);

  const CMatrix CD = bvp.boundary.compound();
  std::vector<std::vector<std::vector<int>>> subsets(n + 1);
  std::vector<CMatrix> minors(n + 1);
  std::vector<double> log_scale(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) {
    subsets[k] = combinations(n, k);
    minors[k] = CMatrix::Identity(static_cast<Eigen::Index>(subsets[k].size()), static_cast<Eigen::Index>(subsets[k].size()));
  }
  walk_steps(gen, merged_nodes(bvp.potential.breakpoints(), {}), pc, budget, kMarchGrowth,
             [&](const CMatrix& E, double) {
               for (int k = 1; k <= n; ++k) {
                 minors[k] = compound(E, subsets[k]) * minors[k];
                 const double m = minors[k].cwiseAbs().maxCoeff();
                 if (m > kMarchRenormalize) {
                   minors[k] /= m;
                   log_scale[k] += std::log(m);
                 }
               }
             });

  // Terms of order k pair rows S_bot of Φ with the columns J left over by S_top.
  std::vector<cplx> partial(n + 1, 0.0);
  partial[0] = linalg::det(bvp.C());
  for (int k = 1; k <= n; ++k) {
    const auto& sets = subsets[k];
    for (std::size_t ji = 0; ji < sets.size(); ++ji) {
      const auto& J = sets[ji];
      std::vector<int> order;
      for (int i = 0, p = 0; i < n; ++i) {
        if (p < k && J[p] == i) {
          ++p;
          continue;
        }
        order.push_back(i);
      }
      std::vector<int> cols(order);
      cols.insert(cols.end(), J.begin(), J.end());
      const int sign = permutation_sign(cols);
      CMatrix sub(n, n);
      for (int i = 0; i < n - k; ++i) sub.col(i) = CD.col(order[i]);
      for (std::size_t ri = 0; ri < sets.size(); ++ri) {
        for (int i = 0; i < k; ++i) sub.col(n - k + i) = CD.col(n + sets[ri][i]);
        const cplx coef = linalg::det(sub);
        if (coef != cplx(0.0)) partial[k] += static_cast<double>(sign) * coef * minors[k](static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(ji));
      }
    }
  }
  const double top = *std::max_element(log_scale.begin(), log_scale.end());
  cplx sum = 0.0;
  for (int k = 0; k <= n; ++k) sum += partial[k] * std::exp(log_scale[k] - top);
  const cplx d = sum * std::exp(top);
  if (!std::isfinite(d.real()) || !std::isfinite(d.imag()))
    throw NumericalError("characteristic determinant overflowed");
  return d;
}

GaugeResult gauge_normalize(const DiracBVP& bvp, int min_cells, const StepControl& ctrl) {
  const int n = bvp.n();
  const auto& B = bvp.weight;
  const auto& q = bvp.potential;
  std::vector<int> block_of(n);
  const auto blocks = value_blocks(B);
  for (std::size_t a = 0; a < blocks.size(); ++a)
    for (int j : blocks[a].indices) block_of[j] = static_cast<int>(a);

  auto diag_part = [&](const CMatrix& m) {
    CMatrix d = CMatrix::Zero(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (block_of[r] == block_of[c]) d(r, c) = m(r, c);
    return d;
  };

  bool q1_zero = true, qoff_zero = true;
  for (const auto& s : q.samples()) {
    const CMatrix d = diag_part(s);
    if (d.cwiseAbs().maxCoeff() != 0.0) q1_zero = false;
    if ((s - d).cwiseAbs().maxCoeff() != 0.0) qoff_zero = false;
  }
  if (q1_zero) return {bvp, {{0.0, 1.0}, {CMatrix::Identity(n, n), CMatrix::Identity(n, n)}}};

  const auto gen = [&](double x) {
    CMatrix a = diag_part(q.at(x));
    for (int j = 0; j < n; ++j) a.row(j) *= -kI * B.b[j];
    return a;
  };
  const bool pc = q.piecewise_constant();
  const int m0 = q.kind() == PotentialKind::grid ? q.cells() : 1;
  const int m = m0 * static_cast<int>(std::ceil(static_cast<double>(std::max(min_cells, m0)) / m0));
  const bool step_out = q.kind() == PotentialKind::grid && q.interp() == 0;

  std::vector<double> xs;
  for (int i = 0; i <= m; ++i) {
    xs.push_back(static_cast<double>(i) / m);
    if (step_out && i < m) xs.push_back((i + 0.5) / m);
  }
  xs.back() = 1.0;
  const long rate = std::max(16, ctrl.base_steps) *
                    static_cast<long>(std::ceil(1.0 + potential_scale(q) * B.max_abs() / kPi));
  const auto W = integrate_linear(gen, n, q.breakpoints(), pc, xs, std::max<long>(rate, m));

  GaugeResult res;
  res.bvp = bvp;
  res.bvp.boundary.D = bvp.D() * W.back();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (step_out && i % 2 == 1) continue;
    res.record.x.push_back(xs[i]);
    res.record.W.push_back(W[i]);
  }

  BoolMatrix flags(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      bool ok = true;
      if (block_of[r] != block_of[c])
        for (int rr : blocks[block_of[r]].indices)
          for (int cc : blocks[block_of[c]].indices) ok = ok && q.continuity()(rr, cc);
      flags(r, c) = ok;
    }

  if (qoff_zero) {
    res.bvp.potential = PotentialField::zero(n);
    return res;
  }
  auto conj_sample = [&](double x, const CMatrix& w) {
    const CMatrix s = q.at(x);
    return CMatrix(w.partialPivLu().solve(CMatrix((s - diag_part(s)) * w)));
  };
  std::vector<CMatrix> samples;
  if (step_out) {
    for (int i = 0; i < m; ++i) samples.push_back(conj_sample((i + 0.5) / m, W[2 * i + 1]));
    samples.push_back(conj_sample(1.0, W.back()));
    res.bvp.potential = PotentialField::grid(std::move(samples), 0, flags);
  } else {
    for (int i = 0; i <= m; ++i) samples.push_back(conj_sample(xs[i], W[i]));
    res.bvp.potential = PotentialField::grid(std::move(samples), 1, flags);
  }
  return res;
}

}  // namespace dspec

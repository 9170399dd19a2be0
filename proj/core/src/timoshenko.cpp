#include "dspec/timoshenko.hpp"

#include <algorithm>
#include <cmath>

// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

namespace dspec {

namespace {

int common_cells(const BeamModel& b) {
  const Eigen::Index sizes[] = {b.rho.size(), b.I_rho.size(), b.K.size(), b.EI.size(), b.p1.size(), b.p2.size()};
  Eigen::Index m = 1;
  for (Eigen::Index s : sizes) {
    if (s < 1) throw ValidationError("beam profile is empty");
    if (s > 1) {
      if (m > 1 && s != m) throw ValidationError("beam profiles must share one sample grid");
      m = s;
    }
  }
  return static_cast<int>(m) - 1;
}

template <class V>
V expand(const V& v, int cells) {
  if (v.size() > 1) return v;
  return V::Constant(cells + 1, v(0));
}

RVector derivative(const RVector& f, double dx) {
  const Eigen::Index m = f.size() - 1;
  RVector d = RVector::Zero(f.size());
  if (m < 1) return d;
  if (m == 1) {
    d.setConstant((f(1) - f(0)) / dx);
    return d;
  }
  for (Eigen::Index i = 1; i < m; ++i) d(i) = (f(i + 1) - f(i - 1)) / (2 * dx);
  d(0) = (-3 * f(0) + 4 * f(1) - f(2)) / (2 * dx);
  d(m) = (3 * f(m) - 4 * f(m - 1) + f(m - 2)) / (2 * dx);
  return d;
}

bool nonzero(cplx v, double scale) { return std::abs(v) > 1e-12 * std::max(1.0, scale); }

}  // namespace

BeamModel constant_beam(double length, double rho, double I_rho, double K, double EI, cplx alpha1, cplx alpha2,
                        cplx beta1, cplx beta2, cplx p1, cplx p2) {
  BeamModel b;
  b.length = length;
  b.rho = RVector::Constant(1, rho);
  b.I_rho = RVector::Constant(1, I_rho);
  b.K = RVector::Constant(1, K);
  b.EI = RVector::Constant(1, EI);
  b.p1 = CVector::Constant(1, p1);
  b.p2 = CVector::Constant(1, p2);
  b.alpha1 = alpha1;
  b.alpha2 = alpha2;
  b.beta1 = beta1;
  b.beta2 = beta2;
  return b;
}

double ReductionResult::x_of_t(double tv) const {
  if (x.size() < 4) {
    const auto it = std::upper_bound(t.data(), t.data() + t.size(), tv);
    const Eigen::Index k = std::clamp<Eigen::Index>(it - t.data() - 1, 0, t.size() - 2);
    const double w = (tv - t(k)) / (t(k + 1) - t(k));
    return x[k] + w * (x[k + 1] - x[k]);
  }
  std::vector<double> tt(t.data(), t.data() + t.size()), xx(x);
  boost::math::interpolators::pchip<std::vector<double>> inv(std::move(tt), std::move(xx));
  return inv(std::clamp(tv, 0.0, 1.0));
}

ReductionResult reduce_to_dirac(const BeamModel& beam, int resample_cells) {
  if (!(beam.length > 0)) throw ValidationError("beam length must be positive");
  const int m = common_cells(beam);
  const RVector rho = expand(beam.rho, m), Ir = expand(beam.I_rho, m), K = expand(beam.K, m), EI = expand(beam.EI, m);
  const CVector p1 = expand(beam.p1, m), p2 = expand(beam.p2, m);
  for (const auto* v : {&rho, &Ir, &K, &EI})
    if (!(v->minCoeff() > 0) || !v->allFinite()) throw ValidationError("beam profiles rho, I_rho, K, EI must be positive");
  const RVector nu = (EI.array() * rho.array() / (K.array() * Ir.array())).matrix();
  const double nu_mean = nu.mean();
  if ((nu.array() - nu_mean).abs().maxCoeff() > kNuTol * nu_mean)
    throw ValidationError("EI*rho/(K*I_rho) is not constant along the beam");

  ReductionResult r;
  const double dx = m > 0 ? beam.length / m : beam.length;
  r.x.resize(m + 1);
  for (int i = 0; i <= m; ++i) r.x[i] = m > 0 ? beam.length * i / m : 0.0;
  const RVector s1 = (Ir.array() / EI.array()).sqrt().matrix();
  const RVector s2 = (rho.array() / K.array()).sqrt().matrix();
  if (m == 0) {
    r.b1 = s1(0) * beam.length;
    r.gamma = RVector::Constant(1, 1.0 / beam.length);
    r.t = RVector::Constant(1, 0.0);
  } else {
    RVector cum(m + 1);
    cum(0) = 0.0;
    for (int i = 1; i <= m; ++i) cum(i) = cum(i - 1) + 0.5 * dx * (s1(i - 1) + s1(i));
    r.b1 = cum(m);
    r.gamma = s1 / r.b1;
    r.t = cum / r.b1;
    r.t(m) = 1.0;
  }
  r.b2 = (s2.array() / r.gamma.array()).mean();
  r.h1 = (EI.array() * Ir.array()).sqrt().matrix();
  r.h2 = (K.array() * rho.array()).sqrt().matrix();
  r.dh1 = derivative(r.h1, dx);
  r.dh2 = derivative(r.h2, dx);
  r.h1_end = r.h1(m);
  r.h2_end = r.h2(m);
  r.dh1_end = r.dh1(m);
  r.dh2_end = r.dh2(m);
  r.p1_end = p1(m);
  r.p2_end = p2(m);

  std::vector<CMatrix> qhat(m + 1);
  for (int i = 0; i <= m; ++i) {
    const cplx a1 = p1(i) + r.dh1(i), a2 = p1(i) - r.dh1(i);
    const cplx c1 = p2(i) + r.dh2(i), c2 = p2(i) - r.dh2(i);
    const double h2 = r.h2(i);
    CMatrix M(4, 4);
    M << a1, a2, h2, -h2,
         a1, a2, h2, -h2,
         -h2, -h2, c1, c2,
         h2, h2, c1, c2;
    const cplx t1 = -2.0 * kI * Ir(i), t2 = -2.0 * kI * rho(i);
    M.topRows(2) /= t1;
    M.bottomRows(2) /= t2;
    qhat[i] = M;
  }

  const bool constant = std::all_of(qhat.begin(), qhat.end(), [&](const CMatrix& q) { return q == qhat.front(); });
  BoolMatrix flags = BoolMatrix::Constant(4, 4, true);
  PotentialField Q;
  if (constant) {
    Q = PotentialField::constant(qhat.front(), flags);
  } else {
    const int cells = std::max(resample_cells, m);
    std::vector<CMatrix> samples(cells + 1);
    for (int k = 0; k <= cells; ++k) {
      const double xv = r.x_of_t(static_cast<double>(k) / cells);
      const double u = std::clamp(xv / dx, 0.0, static_cast<double>(m));
      const int j = std::min(static_cast<int>(u), m - 1);
      const double w = u - j;
      samples[k] = (1.0 - w) * qhat[j] + w * qhat[j + 1];
    }
    Q = PotentialField::grid(std::move(samples), 1, flags);
  }

  CMatrix C = CMatrix::Zero(4, 4), D = CMatrix::Zero(4, 4);
  C(0, 0) = C(0, 1) = C(2, 2) = C(2, 3) = 1.0;
  D(1, 0) = beam.alpha1 - r.h1_end;
  D(1, 1) = beam.alpha1 + r.h1_end;
  D(1, 2) = D(1, 3) = beam.beta1;
  D(3, 0) = D(3, 1) = beam.beta2;
  D(3, 2) = beam.alpha2 - r.h2_end;
  D(3, 3) = beam.alpha2 + r.h2_end;
  r.dirac = make_bvp({-r.b1, r.b1, -r.b2, r.b2}, C, D, Q);
  return r;
}

BeamConditions beam_conditions(const BeamModel& beam) { return beam_conditions(reduce_to_dirac(beam), beam); }

BeamConditions beam_conditions(const ReductionResult& red, const BeamModel& beam) {
  BeamConditions c;
  const cplx a1 = beam.alpha1, a2 = beam.alpha2, bb = beam.beta1 * beam.beta2;
  const double h1 = red.h1_end, h2 = red.h2_end;
  const double scale = std::max({std::abs(a1) + h1, std::abs(a2) + h2, std::abs(bb)});
  c.det_TB = (a1 + h1) * (a2 + h2) - bb;
  c.det_TmB = (a1 - h1) * (a2 - h2) - bb;
  const bool plus = nonzero(c.det_TB, scale * scale);
  const bool minus = nonzero(c.det_TmB, scale * scale);
  c.checks.push_back({"(alpha1+h1)(alpha2+h2) - beta1*beta2", c.det_TB, plus});
  c.checks.push_back({"(alpha1-h1)(alpha2-h2) - beta1*beta2", c.det_TmB, minus});
  c.weak_complete = plus && minus;
  const bool beta_zero = beam.beta1 == cplx(0.0) && beam.beta2 == cplx(0.0);
  const bool bounded = beam.p1.allFinite() && beam.p2.allFinite();
  const bool lipschitz = red.dh1.allFinite() && red.dh2.allFinite();
  c.riesz = c.weak_complete && beta_zero && bounded && lipschitz;

  c.nonweak_applicable = beta_zero;
  const cplx i1 = std::abs(a1 - h1) + std::abs(a2 - h2), i2 = std::abs(a1 + h1) + std::abs(a2 + h2);
  const bool cond_i = nonzero(i1, scale) && nonzero(i2, scale);
  c.checks.push_back({"|alpha1-h1| + |alpha2-h2|", i1, nonzero(i1, scale)});
  c.checks.push_back({"|alpha1+h1| + |alpha2+h2|", i2, nonzero(i2, scale)});
  bool cond_ii = true;
  const cplx alpha[2] = {a1, a2};
  const double h[2] = {h1, h2}, dh[2] = {red.dh1_end, red.dh2_end};
  const cplx p[2] = {red.p1_end, red.p2_end};
  for (int j = 0; j < 2; ++j) {
    const std::string tag = std::to_string(j + 1);
    const double sj = std::abs(alpha[j]) + h[j];
    const cplx sq = alpha[j] * alpha[j] - h[j] * h[j];
    const cplx bgap = dh[j] + p[j], cgap = dh[j] - p[j];
    c.checks.push_back({"alpha" + tag + "^2 - h" + tag + "^2", sq, nonzero(sq, sj * sj)});
    if (nonzero(sq, sj * sj)) {
      c.case_j[j] = 'a';
    } else if (!nonzero(alpha[j] - h[j], sj)) {
      const bool ok = nonzero(bgap, std::abs(dh[j]) + std::abs(p[j]));
      c.checks.push_back({"h" + tag + "'(l) + p" + tag + "(l)", bgap, ok});
      if (ok) c.case_j[j] = 'b';
    } else {
      const bool ok = nonzero(cgap, std::abs(dh[j]) + std::abs(p[j]));
      c.checks.push_back({"h" + tag + "'(l) - p" + tag + "(l)", cgap, ok});
      if (ok) c.case_j[j] = 'c';
    }
    cond_ii = cond_ii && c.case_j[j] != '-';
  }
  c.nonweak_complete = beta_zero && cond_i && cond_ii;
  return c;
}

SpectrumSlice beam_spectrum(const BeamModel& beam, const Rect& region, double tol, const StepControl& ctrl) {
  return locate_eigenvalues(reduce_to_dirac(beam).dirac, region, tol, ctrl);
}

}  // namespace dspec

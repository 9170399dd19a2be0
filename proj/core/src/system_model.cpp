#include "dspec/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dspec/linalg.hpp"

namespace dspec {

namespace {

bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const cplx v = m.data()[i];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

BoolMatrix default_flags(int n, bool value) { return BoolMatrix::Constant(n, n, value); }

}  // namespace

CMatrix WeightMatrix::matrix() const {
  CMatrix m = CMatrix::Zero(n(), n());
  for (int j = 0; j < n(); ++j) m(j, j) = b[j];
  return m;
}

double WeightMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : b) m = std::max(m, std::abs(v));
  return m;
}

cplx WeightMatrix::trace() const {
  cplx s = 0.0;
  for (const auto& v : b) s += v;
  return s;
}

PotentialField PotentialField::zero(int n) {
  PotentialField q;
  q.kind_ = PotentialKind::zero;
  q.n_ = n;
  q.samples_ = {CMatrix::Zero(n, n)};
  q.continuity_ = default_flags(n, true);
  return q;
}

PotentialField PotentialField::constant(CMatrix m, std::optional<BoolMatrix> continuity) {
  PotentialField q;
  q.kind_ = PotentialKind::constant;
  q.n_ = static_cast<int>(m.rows());
  q.samples_ = {std::move(m)};
  q.continuity_ = continuity ? *continuity : default_flags(q.n_, true);
  return q;
}

PotentialField PotentialField::grid(std::vector<CMatrix> samples, int interp,
                                    std::optional<BoolMatrix> continuity) {
  PotentialField q;
  q.kind_ = PotentialKind::grid;
  q.n_ = samples.empty() ? 0 : static_cast<int>(samples.front().rows());
  q.interp_ = interp;
  q.samples_ = std::move(samples);
  q.continuity_ = continuity ? *continuity : default_flags(q.n_, false);
  return q;
}

CMatrix PotentialField::at(double x) const {
  if (kind_ != PotentialKind::grid) return samples_.front();
  const int m = cells();
  x = std::clamp(x, 0.0, 1.0);
  const double t = x * m;
  const double r = std::round(t);
  if (std::abs(t - r) <= 1e-12 * m) return samples_[static_cast<std::size_t>(r)];
  int i = static_cast<int>(std::floor(t));
  i = std::clamp(i, 0, m - 1);
  if (interp_ == 0) return samples_[i];
  const double w = t - i;
  return (1.0 - w) * samples_[i] + w * samples_[i + 1];
}

CMatrix PotentialField::at0() const { return samples_.front(); }
CMatrix PotentialField::at1() const { return samples_.back(); }

bool PotentialField::piecewise_constant() const {
  return kind_ != PotentialKind::grid || interp_ == 0;
}

std::vector<double> PotentialField::breakpoints() const {
  if (kind_ != PotentialKind::grid) return {0.0, 1.0};
  const int m = cells();
  std::vector<double> x(m + 1);
  for (int i = 0; i <= m; ++i) x[i] = static_cast<double>(i) / m;
  x.back() = 1.0;
  return x;
}

CMatrix PotentialField::integral() const {
  if (kind_ != PotentialKind::grid) return samples_.front();
  const int m = cells();
  CMatrix s = CMatrix::Zero(n_, n_);
  if (interp_ == 0) {
    for (int i = 0; i < m; ++i) s += samples_[i];
  } else {
    s = 0.5 * (samples_.front() + samples_.back());
    for (int i = 1; i < m; ++i) s += samples_[i];
  }
  return s / static_cast<double>(m);
}

bool PotentialField::is_zero() const {
  if (kind_ == PotentialKind::zero) return true;
  for (const auto& s : samples_)
    if (s.cwiseAbs().maxCoeff() != 0.0) return false;
  return true;
}

PotentialField PotentialField::with_continuity(BoolMatrix flags) const {
  PotentialField q = *this;
  q.continuity_ = std::move(flags);
  return q;
}

PotentialField PotentialField::permuted(const std::vector<int>& perm) const {
  PotentialField q = *this;
  const int n = n_;
  for (auto& s : q.samples_) {
    CMatrix p(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) p(r, c) = s(perm[r], perm[c]);
    s = p;
  }
  BoolMatrix f(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) f(r, c) = continuity_(perm[r], perm[c]);
  q.continuity_ = f;
  return q;
}

PotentialField PotentialField::adjoint() const {
  PotentialField q = *this;
  for (auto& s : q.samples_) s = s.adjoint().eval();
  q.continuity_ = continuity_.transpose().eval();
  return q;
}

CMatrix BoundaryPair::compound() const {
  CMatrix cd(C.rows(), C.cols() + D.cols());
  cd << C, D;
  return cd;
}

ValidationReport validate_bvp(const DiracBVP& bvp) {
  ValidationReport rep;
  const int n = bvp.n();
  if (n < 1) {
    rep.violations.push_back("dimension n must be positive");
    return rep;
  }
  for (int j = 0; j < n; ++j) {
    const cplx b = bvp.weight.b[j];
    if (!std::isfinite(b.real()) || !std::isfinite(b.imag()))
      rep.violations.push_back("B entry " + std::to_string(j + 1) + " is not finite");
    else if (b == 0.0)
      rep.violations.push_back("B entry " + std::to_string(j + 1) + " is zero: B must be nonsingular");
  }
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      const cplx d = bvp.weight.b[j] - bvp.weight.b[k];
      if (d != 0.0 && std::abs(d) < 1e-8) {
        std::ostringstream os;
        os << "B entries " << j + 1 << " and " << k + 1 << " differ by " << std::abs(d)
           << " and are treated as distinct";
        rep.warnings.push_back(os.str());
      }
    }

  const auto& q = bvp.potential;
  if (q.n() != n) rep.violations.push_back("potential dimension does not match n");
  if (q.kind() == PotentialKind::grid) {
    if (q.samples().size() < 2) rep.violations.push_back("grid potential needs at least 2 samples");
    if (q.interp() != 0 && q.interp() != 1)
      rep.violations.push_back("grid interpolation order must be 0 or 1");
  }
  for (std::size_t i = 0; i < q.samples().size(); ++i) {
    const auto& s = q.samples()[i];
    if (s.rows() != n || s.cols() != n) {
      rep.violations.push_back("potential sample " + std::to_string(i) + " is not n×n");
    } else if (!all_finite(s)) {
      rep.violations.push_back("potential sample " + std::to_string(i) + " has non-finite entries");
    }
  }
  if (q.continuity().rows() != n || q.continuity().cols() != n)
    rep.violations.push_back("endpoint_continuity flags are not n×n");

  const auto& C = bvp.boundary.C;
  const auto& D = bvp.boundary.D;
  if (C.rows() != n || C.cols() != n) rep.violations.push_back("C is not n×n");
  if (D.rows() != n || D.cols() != n) rep.violations.push_back("D is not n×n");
  if (C.rows() == n && C.cols() == n && D.rows() == n && D.cols() == n) {
    if (!all_finite(C) || !all_finite(D)) {
      rep.violations.push_back("C or D has non-finite entries");
    } else {
      Eigen::JacobiSVD<CMatrix> svd(bvp.boundary.compound());
      const auto& s = svd.singularValues();
      const double rank_tol = 1e-10 * s(0);
      if (s(0) == 0.0 || s(n - 1) <= rank_tol)
        rep.violations.push_back("rank of (C D) is less than n: ker(CC*+DD*) is nontrivial");
    }
  }
  return rep;
}

void require_valid(const DiracBVP& bvp) {
  const auto rep = validate_bvp(bvp);
  if (rep.ok()) return;
  std::string msg = "invalid boundary value problem:";
  for (const auto& v : rep.violations) msg += "\n  " + v;
  throw ValidationError(msg);
}

bool is_dirac_type(const WeightMatrix& B, double im_tol) {
  for (const auto& b : B.b)
    if (std::abs(b.imag()) > im_tol * std::max(1.0, std::abs(b))) return false;
  return true;
}

std::vector<ValueBlock> value_blocks(const WeightMatrix& B) {
  std::vector<ValueBlock> blocks;
  for (int j = 0; j < B.n(); ++j) {
    auto it = std::find_if(blocks.begin(), blocks.end(),
                           [&](const ValueBlock& vb) { return vb.value == B.b[j]; });
    if (it == blocks.end())
      blocks.push_back({B.b[j], {j}});
    else
      it->indices.push_back(j);
  }
  return blocks;
}

CanonicalOrder canonical_block_order(const DiracBVP& bvp) {
  std::vector<int> perm;
  for (const auto& vb : value_blocks(bvp.weight))
    perm.insert(perm.end(), vb.indices.begin(), vb.indices.end());
  const int n = bvp.n();
  DiracBVP out = bvp;
  for (int k = 0; k < n; ++k) out.weight.b[k] = bvp.weight.b[perm[k]];
  out.potential = bvp.potential.permuted(perm);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      out.boundary.C(r, c) = bvp.boundary.C(perm[r], perm[c]);
      out.boundary.D(r, c) = bvp.boundary.D(perm[r], perm[c]);
    }
  return {std::move(out), std::move(perm)};
}

DiracBVP make_bvp(std::vector<cplx> b, CMatrix C, CMatrix D, std::optional<PotentialField> q) {
  const int n = static_cast<int>(b.size());
  DiracBVP bvp{WeightMatrix{std::move(b)}, q ? *q : PotentialField::zero(n),
               BoundaryPair{std::move(C), std::move(D)}};
  return bvp;
}

}  // namespace dspec

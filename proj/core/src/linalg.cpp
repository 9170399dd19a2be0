#include "dspec/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace dspec::linalg {

cplx det(const CMatrix& m) {
  if (m.rows() == 0) return 1.0;
  return m.partialPivLu().determinant();
}

double column_norm_product(const CMatrix& m) {
  double p = 1.0;
  for (Eigen::Index k = 0; k < m.cols(); ++k) p *= m.col(k).norm();
  return p;
}

double row_norm_product(const CMatrix& m) {
  double p = 1.0;
  for (Eigen::Index k = 0; k < m.rows(); ++k) p *= m.row(k).norm();
  return p;
}

CMatrix adjugate(const CMatrix& m) {
  const Eigen::Index n = m.rows();
  CMatrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1.0;
    return adj;
  }
  CMatrix minor(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(j, i) = sign * det(minor);
    }
  }
  return adj;
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double smallest_singular_value(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1);
}

double condition_number(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

CMatrix null_space(const CMatrix& m, double rel_tol) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel_tol * smax) ++rank;
  const Eigen::Index cols = m.cols();
  return svd.matrixV().rightCols(cols - rank);
}

int numerical_rank(const CMatrix& m, double rel_tol) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel_tol * s(0)) ++rank;
  return rank;
}

CMatrix expm(const CMatrix& a) { return a.exp(); }

RVector hermitian_eigenvalues(const CMatrix& m) {
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

cplx trapezoid(const std::vector<cplx>& f) {
  const std::size_t m = f.size() - 1;
  cplx s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i < m; ++i) s += f[i];
  return s / static_cast<double>(m);
}

cplx simpson(const std::vector<cplx>& f) {
  const std::size_t m = f.size() - 1;
  if (m < 2) return trapezoid(f);
  const double h = 1.0 / static_cast<double>(m);
  const std::size_t even = (m % 2 == 0) ? m : m - 3;
  cplx s = 0.0;
  for (std::size_t i = 0; i + 2 <= even; i += 2) s += f[i] + 4.0 * f[i + 1] + f[i + 2];
  s *= h / 3.0;
  if (even != m) s += 3.0 * h / 8.0 * (f[m - 3] + 3.0 * f[m - 2] + 3.0 * f[m - 1] + f[m]);
  return s;
}

}  // namespace dspec::linalg

#include "dspec/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dspec/linalg.hpp"

namespace dspec {

namespace {

constexpr double kSymTol = 1e-9;
constexpr int kMinCells = 3;
constexpr double kCandidateFractions[] = {0.05, 0.5, 0.95};

double cross(cplx a, cplx b) { return (std::conj(a) * b).imag(); }

bool nonzero_det(const CMatrix& t) {
  const double scale = linalg::column_norm_product(t);
  return scale > 0.0 && std::abs(linalg::det(t)) > kDetTol * scale;
}

std::optional<std::array<cplx, 3>> find_triple(const std::vector<cplx>& pts) {
  const std::size_t m = pts.size();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      for (std::size_t c = b + 1; c < m; ++c)
        if (triangle_contains_origin(pts[a], pts[b], pts[c])) return std::array<cplx, 3>{pts[a], pts[b], pts[c]};
  return std::nullopt;
}

std::vector<cplx> candidates(const Sector& s) {
  std::vector<cplx> out;
  for (double f : kCandidateFractions) out.push_back(s.point(f));
  return out;
}

bool identically_zero(const DiracBVP& bvp, const StepControl& ctrl) {
  static const cplx probes[] = {{0.7, 0.3}, {-1.3, 0.9}, {2.1, -0.4}, {0.37, 2.2}, {-2.9, -1.1}, {4.3, 0.2}};
  for (cplx lam : probes) {
    const CMatrix m = char_matrix(bvp, lam, ctrl);
    const double bound = linalg::row_norm_product(m);
    if (bound == 0.0) continue;
    if (std::abs(linalg::det(m)) > 1e-12 * bound) return false;
  }
  return true;
}

bool in_row_space(const CMatrix& cd, const CMatrix& row) {
  CMatrix ext(cd.rows() + 1, cd.cols());
  ext << cd, row;
  return linalg::numerical_rank(ext, 1e-10) == linalg::numerical_rank(cd, 1e-10);
}

bool nonzero_rel(cplx v, double scale) { return scale > 0.0 && std::abs(v) > kDetTol * scale; }

double max_abs_potential(const PotentialField& q) {
  double m = 0.0;
  for (const auto& s : q.samples()) m = std::max(m, s.cwiseAbs().maxCoeff());
  return m;
}

// Length of the leading interval [0, eps] on which pred holds, in grid cells (or whole interval).
template <class CellPred>
double prefix_epsilon(const PotentialField& q, CellPred ok_cell) {
  if (q.kind() != PotentialKind::grid) return ok_cell(0) ? 0.5 : 0.0;
  const int m = q.cells();
  int k = 0;
  while (k < m && ok_cell(k)) ++k;
  if (k < kMinCells) return 0.0;
  return std::min(0.5, static_cast<double>(k) / m);
}

}  // namespace

bool triangle_contains_origin(cplx z1, cplx z2, cplx z3, double margin) {
  const double c1 = cross(z1, z2) / (std::abs(z1) * std::abs(z2));
  const double c2 = cross(z2, z3) / (std::abs(z2) * std::abs(z3));
  const double c3 = cross(z3, z1) / (std::abs(z3) * std::abs(z1));
  return (c1 > margin && c2 > margin && c3 > margin) || (c1 < -margin && c2 < -margin && c3 < -margin);
}

std::string to_string(CompletenessStatus s) {
  switch (s) {
    case CompletenessStatus::certified_complete: return "certified_complete";
    case CompletenessStatus::certified_incomplete: return "certified_incomplete";
    case CompletenessStatus::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(CompletenessRule r) {
  switch (r) {
    case CompletenessRule::none: return "none";
    case CompletenessRule::weak_regularity: return "weak_regularity";
    case CompletenessRule::two_by_two_minors: return "two_by_two_minors";
    case CompletenessRule::first_component_dirichlet: return "first_component_dirichlet";
    case CompletenessRule::four_by_four_pattern: return "four_by_four_pattern";
    case CompletenessRule::normal_boundary: return "normal_boundary";
    case CompletenessRule::omega_triple: return "omega_triple";
    case CompletenessRule::antipodal_pair: return "antipodal_pair";
    case CompletenessRule::reflection_symmetry: return "reflection_symmetry";
    case CompletenessRule::decoupled_dirichlet: return "decoupled_dirichlet";
  }
  return "none";
}

std::string to_string(Dissipativity d) {
  switch (d) {
    case Dissipativity::dissipative: return "dissipative";
    case Dissipativity::accumulative: return "accumulative";
    case Dissipativity::selfadjoint: return "selfadjoint";
    case Dissipativity::neither: return "neither";
    case Dissipativity::not_dirac_type: return "not_dirac_type";
  }
  return "neither";
}

std::string to_string(RieszKind k) {
  switch (k) {
    case RieszKind::basis_with_parentheses: return "basis_with_parentheses";
    case RieszKind::no_basis: return "no_basis";
    case RieszKind::unknown: return "unknown";
  }
  return "unknown";
}

std::string to_string(RieszRule r) {
  switch (r) {
    case RieszRule::none: return "none";
    case RieszRule::split_pairs: return "split_pairs";
    case RieszRule::block_diagonal: return "block_diagonal";
    case RieszRule::scalar_weight: return "scalar_weight";
  }
  return "none";
}

RegularityReport classify_regularity(const DiracBVP& bvp, const StepControl& ctrl) {
  require_valid(bvp);
  RegularityReport rep;
  const auto fan = compute_fan(bvp.weight);
  std::vector<cplx> pts;
  rep.regular = true;
  for (const auto& s : fan.sectors) {
    const CMatrix t = build_T(s.representative, bvp.C(), bvp.D(), bvp.weight).matrix;
    const bool nz = nonzero_det(t);
    rep.sector_dets.push_back(linalg::det(t));
    rep.sector_nonzero.push_back(nz);
    rep.regular = rep.regular && nz;
    if (nz)
      for (cplx z : candidates(s)) pts.push_back(z);
  }
  rep.witness_triple = find_triple(pts);
  rep.weakly_regular = rep.witness_triple.has_value();
  rep.degenerate = identically_zero(bvp, ctrl);
  DiracBVP unperturbed = bvp;
  unperturbed.potential = PotentialField::zero(bvp.n());
  rep.degenerate_unperturbed = identically_zero(unperturbed, ctrl);
  return rep;
}

std::optional<CompletenessCertificate> two_by_two_rule(const DiracBVP& bvp) {
  if (bvp.n() != 2) return std::nullopt;
  const cplx b1 = bvp.weight.b[0], b2 = bvp.weight.b[1];
  if (std::abs(std::arg(b1 / b2)) < 1e-12) return std::nullopt;
  const auto& f = bvp.potential.continuity();
  if (!f(0, 1) || !f(1, 0)) return std::nullopt;
  const CMatrix a = bvp.boundary.compound();
  auto J = [&](int j, int k) { return a(0, j - 1) * a(1, k - 1) - a(0, k - 1) * a(1, j - 1); };
  const double s = a.row(0).norm() * a.row(1).norm();
  const CMatrix q0 = bvp.potential.at0(), q1 = bvp.potential.at1();
  const cplx j32 = J(3, 2), j13 = J(1, 3), j42 = J(4, 2), j14 = J(1, 4);
  const cplx u1 = b1 * j13 * q0(0, 1), v1 = b2 * j42 * q1(1, 0);
  const cplx u2 = b1 * j13 * q1(0, 1), v2 = b2 * j42 * q0(1, 0);
  const bool cond1 = nonzero_rel(j32, s) || nonzero_rel(u1 + v1, std::abs(u1) + std::abs(v1));
  const bool cond2 = nonzero_rel(j14, s) || nonzero_rel(u2 + v2, std::abs(u2) + std::abs(v2));
  if (!(cond1 && cond2)) return std::nullopt;
  CompletenessCertificate c;
  c.status = CompletenessStatus::certified_complete;
  c.rule = CompletenessRule::two_by_two_minors;
  c.values = {{"J32", j32}, {"J14", j14}, {"J13", j13}, {"J42", j42},
              {"b1*J13*q12(0)+b2*J42*q21(1)", u1 + v1}, {"b1*J13*q12(1)+b2*J42*q21(0)", u2 + v2}};
  return c;
}

std::optional<CompletenessCertificate> first_component_rule(const DiracBVP& bvp) {
  const int n = bvp.n();
  if (n < 2) return std::nullopt;
  const auto& b = bvp.weight.b;
  int kappa = 0;
  while (kappa < n && b[kappa].real() < 0) ++kappa;
  if (kappa < 1 || kappa >= n) return std::nullopt;
  for (int j = kappa; j < n; ++j)
    if (!(b[j].real() > 0)) return std::nullopt;
  CMatrix e = CMatrix::Zero(1, 2 * n);
  e(0, 0) = 1.0;
  if (!in_row_space(bvp.boundary.compound(), e)) return std::nullopt;
  const auto& f = bvp.potential.continuity();
  for (int j = kappa; j < n; ++j)
    if (!f(0, j)) return std::nullopt;

  const cplx minus_i{0.0, -1.0};
  const CMatrix tb = build_T(minus_i, bvp.C(), bvp.D(), bvp.weight).matrix;
  if (!nonzero_det(tb)) return std::nullopt;
  const CMatrix q0 = bvp.potential.at0();
  cplx sum = 0.0;
  double scale = 0.0;
  for (int j = kappa; j < n; ++j) {
    const CMatrix t = build_T_swapped(kI, bvp.C(), bvp.D(), bvp.weight, {SwapKind::c_to_c, j, 0}).matrix;
    const cplx term = linalg::det(t) * q0(0, j) / (b[0] - b[j]);
    sum += term;
    scale += linalg::column_norm_product(t) * std::abs(q0(0, j) / (b[0] - b[j]));
  }
  if (!nonzero_rel(sum, scale)) return std::nullopt;
  CompletenessCertificate c;
  c.status = CompletenessStatus::certified_complete;
  c.rule = CompletenessRule::first_component_dirichlet;
  c.values = {{"det T_B", linalg::det(tb)}, {"endpoint sum", sum}};
  return c;
}

std::pair<bool, bool> four_by_four_conditions(const FourByFourEntries& e) {
  const double dm = std::max({std::abs(e.d1), std::abs(e.d2), std::abs(e.d3), std::abs(e.d4)});
  const double qm = std::max({1.0, std::abs(e.q12), std::abs(e.q21), std::abs(e.q34), std::abs(e.q43)});
  const double tol = 1e-12 * dm * dm * qm;
  const double c1 = std::abs(e.d2 * e.d4) + std::abs(e.d1 * e.d4 * e.q12) + std::abs(e.d2 * e.d3 * e.q34);
  const double c2 = std::abs(e.d1 * e.d3) + std::abs(e.d2 * e.d3 * e.q21) + std::abs(e.d1 * e.d4 * e.q43);
  return {c1 > tol, c2 > tol};
}

bool four_by_four_pairwise(const FourByFourEntries& e) {
  auto nz = [](cplx a, cplx b) { return std::abs(a) + std::abs(b) != 0.0; };
  return nz(e.d1, e.d2) && nz(e.d3, e.d4) && nz(e.d1, e.d3) && nz(e.d2, e.d4) && nz(e.d1, e.q21) &&
         nz(e.d2, e.q12) && nz(e.d3, e.q43) && nz(e.d4, e.q34);
}

std::optional<CompletenessCertificate> four_by_four_rule(const DiracBVP& bvp) {
  if (bvp.n() != 4 || !is_dirac_type(bvp.weight)) return std::nullopt;
  const auto& b = bvp.weight.b;
  const double p = b[1].real(), q = b[3].real();
  if (!(p > 0 && q > 0) || b[0].real() != -p || b[2].real() != -q) return std::nullopt;
  CMatrix cpat = CMatrix::Zero(4, 4);
  cpat(0, 0) = cpat(0, 1) = cpat(2, 2) = cpat(2, 3) = 1.0;
  const CMatrix& C = bvp.C();
  const CMatrix& D = bvp.D();
  const double dscale = std::max(1.0, D.cwiseAbs().maxCoeff());
  if ((C - cpat).cwiseAbs().maxCoeff() > 1e-12) return std::nullopt;
  for (int k = 0; k < 4; ++k)
    if (std::abs(D(0, k)) > 1e-12 * dscale || std::abs(D(2, k)) > 1e-12 * dscale) return std::nullopt;
  if (std::abs(D(1, 2)) + std::abs(D(1, 3)) + std::abs(D(3, 0)) + std::abs(D(3, 1)) > 1e-12 * dscale)
    return std::nullopt;
  const auto& f = bvp.potential.continuity();
  if (!f(0, 1) || !f(1, 0) || !f(2, 3) || !f(3, 2)) return std::nullopt;
  const CMatrix q1 = bvp.potential.at1();
  const FourByFourEntries e{D(1, 0), D(1, 1), D(3, 2), D(3, 3), q1(0, 1), q1(1, 0), q1(2, 3), q1(3, 2)};
  const auto [c1, c2] = four_by_four_conditions(e);
  if (!(c1 && c2)) return std::nullopt;
  CompletenessCertificate c;
  c.status = CompletenessStatus::certified_complete;
  c.rule = CompletenessRule::four_by_four_pattern;
  c.values = {{"d1", e.d1}, {"d2", e.d2}, {"d3", e.d3}, {"d4", e.d4},
              {"q12(1)", e.q12}, {"q21(1)", e.q21}, {"q34(1)", e.q34}, {"q43(1)", e.q43}};
  return c;
}

namespace {

struct SectorOmega {
  Sector sector;
  OmegaWitness w;
  bool nonzero = false;
};

std::vector<SectorOmega> sector_omegas(const DiracBVP& bvp) {
  const auto fan = compute_fan(bvp.weight);
  std::vector<SectorOmega> out;
  for (const auto& s : fan.sectors) {
    SectorOmega so;
    so.sector = s;
    const cplx z = s.representative;
    const CMatrix t = build_T(z, bvp.C(), bvp.D(), bvp.weight).matrix;
    so.w = {z, linalg::det(t), std::nullopt};
    so.nonzero = nonzero_det(t);
    if (omega1_defined(z, bvp)) {
      so.w.omega1 = omega1(z, bvp);
      so.nonzero = so.nonzero || nonzero_rel(*so.w.omega1, omega1_scale(z, bvp));
    }
    out.push_back(so);
  }
  return out;
}

std::optional<double> vanishing_half_plane(const std::vector<SectorOmega>& so) {
  for (const auto& cand : so) {
    const double theta = cand.sector.phi_start;
    bool all_zero = true;
    bool any = false;
    for (const auto& s : so) {
      double a = std::fmod(s.sector.phi_start - theta, 2 * kPi);
      if (a < 0) a += 2 * kPi;
      if (a + s.sector.width() <= kPi + 1e-12) {
        any = true;
        if (s.nonzero) all_zero = false;
      }
    }
    if (any && all_zero) return theta;
  }
  return std::nullopt;
}

}  // namespace

std::optional<CompletenessCertificate> omega_search(const DiracBVP& bvp) {
  const auto so = sector_omegas(bvp);
  std::vector<cplx> pts;
  for (const auto& s : so)
    if (s.nonzero)
      for (cplx z : candidates(s.sector)) pts.push_back(z);
  const auto tri = find_triple(pts);
  if (!tri) return std::nullopt;
  const auto fan = compute_fan(bvp.weight);
  CompletenessCertificate c;
  c.status = CompletenessStatus::certified_complete;
  c.rule = CompletenessRule::omega_triple;
  for (cplx z : *tri) {
    OmegaWitness w = so[fan.sector_of(z)].w;
    w.z = z;
    c.points.push_back(w);
  }
  return c;
}

std::optional<CompletenessCertificate> antipodal_search(const DiracBVP& bvp) {
  const auto so = sector_omegas(bvp);
  const auto fan = compute_fan(bvp.weight);
  for (const auto& s : so) {
    if (!s.nonzero) continue;
    const int opp = fan.sector_of(-s.w.z);
    if (opp >= 0 && so[opp].nonzero) {
      CompletenessCertificate c;
      c.status = CompletenessStatus::certified_complete;
      c.rule = CompletenessRule::antipodal_pair;
      c.points = {s.w, so[opp].w};
      return c;
    }
  }
  return std::nullopt;
}

std::optional<IncompletenessWitness> reflection_witness(const DiracBVP& bvp) {
  const CMatrix& C = bvp.C();
  const CMatrix& D = bvp.D();
  auto invertible = [](const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& s = svd.singularValues();
    return s(0) > 0.0 && s(s.size() - 1) > 1e-10 * s(0);
  };
  if (!invertible(C) || !invertible(D)) return std::nullopt;
  const CMatrix A = -C.partialPivLu().solve(D);
  const CMatrix Bm = bvp.weight.matrix();
  const double ab = std::max(1.0, linalg::spectral_norm(A) * linalg::spectral_norm(Bm));
  if ((A * Bm + Bm * A).cwiseAbs().maxCoeff() > kSymTol * ab) return std::nullopt;
  const CMatrix Ainv = A.inverse();
  const auto& q = bvp.potential;
  const double qs = std::max(1.0, max_abs_potential(q));
  auto sym = [&](const CMatrix& left, const CMatrix& right) {
    return (left - Ainv * right * A).cwiseAbs().maxCoeff() <= kSymTol * qs;
  };
  double eps = 0.0;
  if (q.kind() != PotentialKind::grid) {
    eps = sym(q.at0(), q.at0()) ? 0.5 : 0.0;
  } else {
    const int m = q.cells();
    const auto& s = q.samples();
    if (q.interp() == 1)
      eps = prefix_epsilon(q, [&](int k) { return sym(s[m - k], s[k]) && sym(s[m - k - 1], s[k + 1]); });
    else
      eps = prefix_epsilon(q, [&](int k) { return sym(s[m - 1 - k], s[k]); });
  }
  if (eps <= 0.0) return std::nullopt;
  IncompletenessWitness w;
  w.rule = CompletenessRule::reflection_symmetry;
  w.A = A;
  w.epsilon = eps;
  return w;
}

std::optional<IncompletenessWitness> decoupled_dirichlet_witness(const DiracBVP& bvp) {
  const int n = bvp.n();
  const CMatrix cd = bvp.boundary.compound();
  const auto& q = bvp.potential;
  const double qs = std::max(1.0, max_abs_potential(q));
  for (int k = 0; k < n; ++k) {
    CMatrix e = CMatrix::Zero(1, 2 * n);
    e(0, k) = 1.0;
    if (!in_row_space(cd, e)) continue;
    auto row_vanishes = [&](const CMatrix& s) {
      for (int j = 0; j < n; ++j)
        if (j != k && std::abs(s(k, j)) > kSymTol * qs) return false;
      return true;
    };
    double eps = 0.0;
    if (q.kind() != PotentialKind::grid) {
      eps = row_vanishes(q.at0()) ? 0.5 : 0.0;
    } else {
      const auto& s = q.samples();
      if (q.interp() == 1)
        eps = prefix_epsilon(q, [&](int c) { return row_vanishes(s[c]) && row_vanishes(s[c + 1]); });
      else
        eps = prefix_epsilon(q, [&](int c) { return row_vanishes(s[c]); });
    }
    if (eps > 0.0) {
      IncompletenessWitness w;
      w.rule = CompletenessRule::decoupled_dirichlet;
      w.component = k;
      w.epsilon = eps;
      return w;
    }
  }
  return std::nullopt;
}

std::optional<IncompletenessWitness> incompleteness_witness(const DiracBVP& bvp) {
  if (auto w = reflection_witness(bvp)) return w;
  return decoupled_dirichlet_witness(bvp);
}

CompletenessCertificate completeness_certificate(const DiracBVP& bvp) {
  require_valid(bvp);
  {
    const auto fan = compute_fan(bvp.weight);
    std::vector<cplx> pts;
    for (const auto& s : fan.sectors)
      if (nonzero_det(build_T(s.representative, bvp.C(), bvp.D(), bvp.weight).matrix))
        for (cplx z : candidates(s)) pts.push_back(z);
    if (const auto tri = find_triple(pts)) {
      CompletenessCertificate c;
      c.status = CompletenessStatus::certified_complete;
      c.rule = CompletenessRule::weak_regularity;
      for (cplx z : *tri) c.points.push_back({z, omega0(z, bvp.C(), bvp.D(), bvp.weight), std::nullopt});
      return c;
    }
  }
  if (auto c = two_by_two_rule(bvp)) return *c;
  if (auto c = first_component_rule(bvp)) return *c;
  if (auto c = four_by_four_rule(bvp)) return *c;
  if (normality_check(bvp.weight, bvp.C(), bvp.D())) {
    CompletenessCertificate c;
    c.status = CompletenessStatus::certified_complete;
    c.rule = CompletenessRule::normal_boundary;
    return c;
  }
  if (auto c = omega_search(bvp)) return *c;
  if (auto c = antipodal_search(bvp)) return *c;
  CompletenessCertificate c;
  if (auto w = incompleteness_witness(bvp)) {
    c.status = CompletenessStatus::certified_incomplete;
    c.rule = w->rule;
    c.incompleteness = w;
  }
  c.vanishing_half_plane = vanishing_half_plane(sector_omegas(bvp));
  return c;
}

bool normality_check(const WeightMatrix& B, const CMatrix& C, const CMatrix& D, double tol) {
  const CMatrix Bm = B.matrix();
  const CMatrix x = C * Bm * C.adjoint();
  const CMatrix y = D * Bm * D.adjoint();
  const double floor = 1e-14 * (C.squaredNorm() + D.squaredNorm()) * B.max_abs();
  return linalg::spectral_norm(x - y) <= tol * (linalg::spectral_norm(x) + linalg::spectral_norm(y)) + floor;
}

Dissipativity dissipativity_check(const DiracBVP& bvp) {
  if (!is_dirac_type(bvp.weight)) return Dissipativity::not_dirac_type;
  CMatrix Bm = CMatrix::Zero(bvp.n(), bvp.n());
  for (int j = 0; j < bvp.n(); ++j) Bm(j, j) = bvp.weight.b[j].real();
  const CMatrix x = bvp.C() * Bm * bvp.C().adjoint();
  const CMatrix y = bvp.D() * Bm * bvp.D().adjoint();
  const RVector h = linalg::hermitian_eigenvalues(x - y);
  const double tol_h = 1e-10 * (linalg::spectral_norm(x) + linalg::spectral_norm(y)) +
                       1e-14 * (bvp.C().squaredNorm() + bvp.D().squaredNorm()) * bvp.weight.max_abs();
  double qmin = 0.0, qmax = 0.0, qnorm = 0.0;
  for (const auto& s : bvp.potential.samples()) {
    const CMatrix im = (s - s.adjoint()) / (2.0 * kI);
    const RVector e = linalg::hermitian_eigenvalues(im);
    qmin = std::min(qmin, e.minCoeff());
    qmax = std::max(qmax, e.maxCoeff());
    qnorm = std::max(qnorm, linalg::spectral_norm(s));
  }
  const double tol_q = 1e-10 * std::max(1.0, qnorm);
  const bool h_zero = h.cwiseAbs().maxCoeff() <= tol_h;
  const bool q_real = std::max(-qmin, qmax) <= tol_q;
  if (h_zero && q_real) return Dissipativity::selfadjoint;
  if (h.minCoeff() >= -tol_h && qmax <= tol_q) return Dissipativity::accumulative;
  if (h.maxCoeff() <= tol_h && qmin >= -tol_q) return Dissipativity::dissipative;
  return Dissipativity::neither;
}

namespace {

double wrap_angle(double a) {
  a = std::fmod(a, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  if (a >= 2 * kPi - 1e-14) a = 0.0;
  return a;
}

bool invertible_block(const CMatrix& m) {
  if (m.size() == 0) return false;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return s(0) > 0.0 && s(s.size() - 1) > 1e-10 * s(0);
}

// Rows of the row space of R that vanish outside the column set S, restricted to S.
CMatrix supported_rows(const CMatrix& R, const std::vector<int>& S) {
  const int cols = static_cast<int>(R.cols());
  std::vector<bool> in(cols, false);
  for (int c : S) in[c] = true;
  std::vector<int> comp;
  for (int c = 0; c < cols; ++c)
    if (!in[c]) comp.push_back(c);
  CMatrix Rc(R.rows(), static_cast<Eigen::Index>(comp.size()));
  for (std::size_t i = 0; i < comp.size(); ++i) Rc.col(static_cast<Eigen::Index>(i)) = R.col(comp[i]);
  CMatrix Y;
  if (comp.empty())
    Y = CMatrix::Identity(R.rows(), R.rows());
  else
    Y = linalg::null_space(Rc.transpose(), 1e-10);
  CMatrix Rs(R.rows(), static_cast<Eigen::Index>(S.size()));
  for (std::size_t i = 0; i < S.size(); ++i) Rs.col(static_cast<Eigen::Index>(i)) = R.col(S[i]);
  return Y.transpose() * Rs;
}

bool split_shape_ok(const CMatrix& R, const std::vector<int>& ia, const std::vector<int>& ib, int offset) {
  std::vector<int> S;
  for (int c : ia) S.push_back(c + offset);
  for (int c : ib) S.push_back(c + offset);
  const CMatrix V = supported_rows(R, S);
  const int na = static_cast<int>(ia.size());
  if (V.rows() != na) return false;
  return invertible_block(V.leftCols(na)) && invertible_block(V.rightCols(na));
}

bool block_shape_ok(const CMatrix& R, const std::vector<int>& idx, int n) {
  std::vector<int> S;
  for (int c : idx) S.push_back(c);
  for (int c : idx) S.push_back(c + n);
  const CMatrix V = supported_rows(R, S);
  const int nj = static_cast<int>(idx.size());
  if (V.rows() != nj) return false;
  return invertible_block(V.leftCols(nj)) && invertible_block(V.rightCols(nj));
}

void matchings(std::vector<int>& free, std::vector<std::pair<int, int>>& cur,
               std::vector<std::vector<std::pair<int, int>>>& out) {
  if (free.empty()) {
    out.push_back(cur);
    return;
  }
  const int a = free.front();
  for (std::size_t i = 1; i < free.size(); ++i) {
    const int b = free[i];
    std::vector<int> rest;
    for (std::size_t k = 1; k < free.size(); ++k)
      if (k != i) rest.push_back(free[k]);
    cur.emplace_back(a, b);
    matchings(rest, cur, out);
    cur.pop_back();
  }
}

}  // namespace

RieszVerdict riesz_verdict(const DiracBVP& bvp) {
  require_valid(bvp);
  const auto ordered = canonical_block_order(bvp).bvp;
  const int n = ordered.n();
  const CMatrix R = ordered.boundary.compound();
  const auto blocks = value_blocks(ordered.weight);
  RieszVerdict v;

  if (blocks.size() == 1) {
    const cplx beta = blocks.front().value;
    const double scale = linalg::row_norm_product(ordered.C()) * linalg::row_norm_product(ordered.D());
    const bool yes = scale > 0.0 && std::abs(linalg::det(ordered.C()) * linalg::det(ordered.D())) > kDetTol * scale;
    v.rule = RieszRule::scalar_weight;
    v.kind = yes ? RieszKind::basis_with_parentheses : RieszKind::no_basis;
    if (yes) {
      const double phi = std::arg(beta);
      v.angles = {wrap_angle(-phi), wrap_angle(kPi - phi)};
      v.lattice_steps = {beta};
    }
    return v;
  }

  if (blocks.size() % 2 == 0) {
    std::vector<int> free(blocks.size());
    std::iota(free.begin(), free.end(), 0);
    std::vector<std::pair<int, int>> cur;
    std::vector<std::vector<std::pair<int, int>>> all;
    matchings(free, cur, all);
    for (const auto& m : all) {
      bool ok = true;
      for (const auto& [a, b] : m) {
        const cplx ratio = blocks[a].value / blocks[b].value;
        if (!(ratio.real() < 0 && std::abs(ratio.imag()) <= 1e-12 * std::abs(ratio)) ||
            blocks[a].indices.size() != blocks[b].indices.size()) {
          ok = false;
          break;
        }
        if (!split_shape_ok(R, blocks[a].indices, blocks[b].indices, 0) ||
            !split_shape_ok(R, blocks[a].indices, blocks[b].indices, n)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      v.kind = RieszKind::basis_with_parentheses;
      v.rule = RieszRule::split_pairs;
      for (const auto& [a, b] : m) {
        const cplx d = blocks[a].value - blocks[b].value;
        const double phi = std::arg(d);
        for (double ang : {wrap_angle(-phi), wrap_angle(kPi - phi)})
          if (std::none_of(v.angles.begin(), v.angles.end(), [&](double x) { return std::abs(x - ang) < 1e-12; }))
            v.angles.push_back(ang);
        v.lattice_steps.push_back(d);
        v.pairs.emplace_back(a, b);
      }
      std::sort(v.angles.begin(), v.angles.end());
      return v;
    }
  }

  bool diag_ok = true;
  for (const auto& blk : blocks) diag_ok = diag_ok && block_shape_ok(R, blk.indices, n);
  if (diag_ok) {
    v.kind = RieszKind::basis_with_parentheses;
    v.rule = RieszRule::block_diagonal;
    for (const auto& blk : blocks) {
      const double phi = std::arg(blk.value);
      for (double ang : {wrap_angle(-phi), wrap_angle(kPi - phi)})
        if (std::none_of(v.angles.begin(), v.angles.end(), [&](double x) { return std::abs(x - ang) < 1e-12; }))
          v.angles.push_back(ang);
      v.lattice_steps.push_back(blk.value);
    }
    std::sort(v.angles.begin(), v.angles.end());
  }
  return v;
}

SynthesisVerdict synthesis_verdict(const DiracBVP& bvp, const CompletenessCertificate& completeness,
                                   const StepControl& ctrl) {
  SynthesisVerdict v;
  v.dissipativity = dissipativity_check(bvp);
  if (v.dissipativity == Dissipativity::not_dirac_type || v.dissipativity == Dissipativity::neither) return v;
  v.applicable = true;
  v.admits_synthesis = completeness.status == CompletenessStatus::certified_complete;
  const bool upper = v.dissipativity == Dissipativity::dissipative;
  for (const auto& b : bvp.weight.b) {
    const double r = b.real();
    if (!upper && r > 0) v.tau += r;
    if (upper && r < 0) v.tau -= r;
  }
  std::vector<double> logt;
  for (double t : {10.0, 20.0, 40.0, 80.0}) {
    const cplx lam = upper ? cplx(0.0, t) : cplx(0.0, -t);
    try {
      const double a = std::abs(char_determinant(bvp, lam, ctrl));
      if (a <= 0.0) continue;
      v.ladder.push_back(t);
      v.log_abs_delta.push_back(std::log(a));
      logt.push_back(std::log(t));
    } catch (const NumericalError&) {
    }
  }
  const std::size_t m = v.ladder.size();
  if (m >= 2) {
    auto slope = [&](const std::vector<double>& x, const std::vector<double>& y) {
      const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
      const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
      }
      return sxy / sxx;
    };
    v.growth_rate = slope(v.ladder, v.log_abs_delta);
    std::vector<double> resid(m);
    for (std::size_t i = 0; i < m; ++i) resid[i] = v.log_abs_delta[i] - v.tau * v.ladder[i];
    v.power = -slope(logt, resid);
  }
  return v;
}

}  // namespace dspec

#include "dspec/sector_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace dspec {

namespace {

constexpr double kAngleDedup = 1e-12;
constexpr double kLineTol = 1e-14;

double wrap_pi(double a) {
  a = std::fmod(a, kPi);
  if (a < 0) a += kPi;
  if (a >= kPi - kAngleDedup) a = 0.0;
  return a;
}

double wrap_2pi(double a) {
  a = std::fmod(a, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  return a;
}

// Re(i w z) = 0 along the direction -arg w (mod π).
double line_angle(cplx w) { return wrap_pi(-std::arg(w)); }

double re_ibz(cplx b, cplx z) { return (kI * b * z).real(); }

}  // namespace

cplx Sector::point(double fraction) const { return std::polar(1.0, phi_start + fraction * width()); }

bool Sector::contains_angle(double phi) const {
  phi = wrap_2pi(phi);
  if (phi <= phi_start) phi += 2 * kPi;
  return phi > phi_start && phi < phi_end;
}

int SectorFan::sector_of(cplx lambda) const {
  if (lambda == 0.0) return -1;
  const double phi = std::arg(lambda);
  for (double l : lines) {
    const double d = std::abs(std::remainder(phi - l, kPi));
    if (d < kAngleDedup) return -1;
  }
  for (int p = 0; p < size(); ++p)
    if (sectors[p].contains_angle(phi)) return p;
  return -1;
}

SectorFan compute_fan(const WeightMatrix& B) {
  std::vector<double> raw;
  const auto blocks = value_blocks(B);
  for (const auto& vb : blocks) raw.push_back(line_angle(vb.value));
  for (std::size_t a = 0; a < blocks.size(); ++a)
    for (std::size_t c = a + 1; c < blocks.size(); ++c)
      raw.push_back(line_angle(blocks[a].value - blocks[c].value));
  std::sort(raw.begin(), raw.end());
  SectorFan fan;
  for (double a : raw)
    if (fan.lines.empty() || a - fan.lines.back() > kAngleDedup) fan.lines.push_back(a);
  if (fan.lines.size() > 1 && fan.lines.back() - fan.lines.front() > kPi - kAngleDedup)
    fan.lines.pop_back();

  std::vector<double> rays;
  for (double a : fan.lines) rays.push_back(a);
  for (double a : fan.lines) rays.push_back(a + kPi);
  std::sort(rays.begin(), rays.end());
  for (std::size_t p = 0; p < rays.size(); ++p) {
    Sector s;
    s.phi_start = rays[p];
    s.phi_end = p + 1 < rays.size() ? rays[p + 1] : rays.front() + 2 * kPi;
    s.representative = std::polar(1.0, 0.5 * (s.phi_start + s.phi_end));
    for (const auto& b : B.b) {
      const double r = re_ibz(b, s.representative);
      if (std::abs(r) < kLineTol * std::abs(b))
        throw NumericalError("sector representative too close to a separating line");
      s.signs.push_back(r > 0 ? 1 : -1);
    }
    for (double f : {0.1, 0.9}) {
      const cplx z = s.point(f);
      for (int j = 0; j < B.n(); ++j)
        if ((re_ibz(B.b[j], z) > 0 ? 1 : -1) != s.signs[j])
          throw NumericalError("sign pattern is not constant across a sector");
    }
    fan.sectors.push_back(std::move(s));
  }
  return fan;
}

bool is_admissible(cplx z, const WeightMatrix& B) {
  if (z == 0.0) throw PreconditionError("z = 0 is neither admissible nor feasible");
  for (const auto& b : B.b)
    if (std::abs(re_ibz(b, z)) <= kLineTol * std::abs(b) * std::abs(z)) return false;
  return true;
}

bool is_feasible(cplx z, const WeightMatrix& B) {
  if (!is_admissible(z, B)) return false;
  for (int j = 0; j < B.n(); ++j)
    for (int k = j + 1; k < B.n(); ++k) {
      const cplx d = B.b[j] - B.b[k];
      if (d == 0.0) continue;
      if (std::abs(re_ibz(d, z)) <= kLineTol * std::abs(d) * std::abs(z)) return false;
    }
  return true;
}

std::vector<int> sign_pattern(cplx z, const WeightMatrix& B) {
  if (!is_admissible(z, B)) throw PreconditionError("z is not admissible for B");
  std::vector<int> s;
  for (const auto& b : B.b) s.push_back(re_ibz(b, z) > 0 ? 1 : -1);
  return s;
}

TMatrix build_T(cplx z, const CMatrix& C, const CMatrix& D, const WeightMatrix& B) {
  const auto s = sign_pattern(z, B);
  CMatrix t(C.rows(), C.cols());
  for (int k = 0; k < B.n(); ++k) t.col(k) = s[k] < 0 ? C.col(k) : D.col(k);
  return {z, t};
}

TMatrix build_T_swapped(cplx z, const CMatrix& C, const CMatrix& D, const WeightMatrix& B,
                        const Swap& swap) {
  const auto s = sign_pattern(z, B);
  const int n = B.n();
  if (swap.j < 0 || swap.j >= n || swap.k < 0 || swap.k >= n || s[swap.j] >= 0 || s[swap.k] <= 0)
    throw PreconditionError("swap indices must name a C-column j and a D-column k of T");
  TMatrix t = build_T(z, C, D, B);
  if (swap.kind == SwapKind::c_to_c)
    t.matrix.col(swap.j) = C.col(swap.k);
  else
    t.matrix.col(swap.k) = D.col(swap.j);
  return t;
}

}  // namespace dspec

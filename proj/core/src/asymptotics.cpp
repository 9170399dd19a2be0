#include "dspec/asymptotics.hpp"

#include <cmath>

#include "dspec/linalg.hpp"

namespace dspec {

namespace {

void require_in_sector(cplx lambda, const Sector& s) {
  if (lambda == 0.0 || !s.contains_angle(std::arg(lambda)))
    throw PreconditionError("lambda does not lie inside the model's sector");
}

}  // namespace

std::pair<cplx, cplx> gamma_tau(const DiracBVP& bvp, const Sector& sector) {
  const CMatrix iq = bvp.potential.integral();
  cplx expo = 0.0, tau = 0.0;
  for (int j = 0; j < bvp.n(); ++j) {
    if (sector.signs[j] <= 0) continue;
    expo -= kI * bvp.weight.b[j] * iq(j, j);
    tau += bvp.weight.b[j];
  }
  return {std::exp(expo), tau};
}

cplx omega0(cplx z, const CMatrix& C, const CMatrix& D, const WeightMatrix& B) {
  return linalg::det(build_T(z, C, D, B).matrix);
}

bool omega1_defined(cplx z, const DiracBVP& bvp) {
  const auto s = sign_pattern(z, bvp.weight);
  const auto& f = bvp.potential.continuity();
  for (int j = 0; j < bvp.n(); ++j)
    for (int k = 0; k < bvp.n(); ++k)
      if (s[j] < 0 && s[k] > 0 && (!f(k, j) || !f(j, k))) return false;
  return true;
}

cplx omega1(cplx z, const DiracBVP& bvp) {
  if (!omega1_defined(z, bvp))
    throw PreconditionError("omega1 undefined: endpoint continuity of the coupled entries of Q is not asserted");
  const auto s = sign_pattern(z, bvp.weight);
  const auto& B = bvp.weight;
  const CMatrix q0 = bvp.potential.at0();
  const CMatrix q1 = bvp.potential.at1();
  cplx w = 0.0;
  for (int j = 0; j < bvp.n(); ++j)
    for (int k = 0; k < bvp.n(); ++k) {
      if (!(s[j] < 0 && s[k] > 0)) continue;
      const cplx tc = linalg::det(build_T_swapped(z, bvp.C(), bvp.D(), B, {SwapKind::c_to_c, j, k}).matrix);
      const cplx td = linalg::det(build_T_swapped(z, bvp.C(), bvp.D(), B, {SwapKind::d_to_d, j, k}).matrix);
      w += (tc * B.b[k] * q0(k, j) - td * B.b[j] * q1(j, k)) / (B.b[k] - B.b[j]);
    }
  return w;
}

double omega1_scale(cplx z, const DiracBVP& bvp) {
  const auto s = sign_pattern(z, bvp.weight);
  const auto& B = bvp.weight;
  const CMatrix q0 = bvp.potential.at0();
  const CMatrix q1 = bvp.potential.at1();
  double total = 0.0;
  for (int j = 0; j < bvp.n(); ++j)
    for (int k = 0; k < bvp.n(); ++k) {
      if (!(s[j] < 0 && s[k] > 0)) continue;
      const double tc =
          linalg::column_norm_product(build_T_swapped(z, bvp.C(), bvp.D(), B, {SwapKind::c_to_c, j, k}).matrix);
      const double td =
          linalg::column_norm_product(build_T_swapped(z, bvp.C(), bvp.D(), B, {SwapKind::d_to_d, j, k}).matrix);
      total += (tc * std::abs(B.b[k] * q0(k, j)) + td * std::abs(B.b[j] * q1(j, k))) / std::abs(B.b[k] - B.b[j]);
    }
  return total;
}

SectorModel sector_model(const DiracBVP& bvp, const SectorFan& fan, int sector) {
  SectorModel m;
  m.sector = sector;
  m.geometry = fan.sectors.at(sector);
  const cplx z = m.geometry.representative;
  std::tie(m.gamma, m.tau) = gamma_tau(bvp, m.geometry);
  m.omega0 = omega0(z, bvp.C(), bvp.D(), bvp.weight);
  if (omega1_defined(z, bvp)) m.omega1 = omega1(z, bvp);
  return m;
}

std::vector<SectorModel> sector_models(const DiracBVP& bvp) {
  const auto fan = compute_fan(bvp.weight);
  std::vector<SectorModel> out;
  for (int p = 0; p < fan.size(); ++p) out.push_back(sector_model(bvp, fan, p));
  return out;
}

cplx delta_model(cplx lambda, const SectorModel& model, int order) {
  require_in_sector(lambda, model.geometry);
  const cplx e = model.gamma * std::exp(kI * model.tau * lambda);
  if (order == 0) return e * model.omega0;
  if (order != 1) throw PreconditionError("model order must be 0 or 1");
  if (!model.omega1) throw PreconditionError("order-1 model requires omega1");
  if (std::abs(lambda) < 1.0) throw PreconditionError("order-1 model is not used for |lambda| < 1");
  return e * (model.omega0 + *model.omega1 / lambda);
}

cplx scaled_determinant(const DiracBVP& bvp, cplx lambda, const SectorModel& model,
                        const StepControl& ctrl) {
  require_in_sector(lambda, model.geometry);
  return char_determinant(bvp, lambda, ctrl) * std::exp(-kI * model.tau * lambda) / model.gamma;
}

}  // namespace dspec

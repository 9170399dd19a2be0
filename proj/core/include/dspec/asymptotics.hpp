#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dspec/propagator.hpp"
#include "dspec/sector_geometry.hpp"

namespace dspec {

struct SectorModel {
  int sector = 0;
  Sector geometry;
  cplx gamma;
  cplx tau;
  cplx omega0;
  std::optional<cplx> omega1;
};

std::pair<cplx, cplx> gamma_tau(const DiracBVP& bvp, const Sector& sector);

cplx omega0(cplx z, const CMatrix& C, const CMatrix& D, const WeightMatrix& B);

// Throws PreconditionError("omega1 undefined ...") when a required continuity flag is missing.
cplx omega1(cplx z, const DiracBVP& bvp);
bool omega1_defined(cplx z, const DiracBVP& bvp);
// Sum of the magnitudes of the terms entering ω₁, for relative zero tests.
double omega1_scale(cplx z, const DiracBVP& bvp);

SectorModel sector_model(const DiracBVP& bvp, const SectorFan& fan, int sector);
std::vector<SectorModel> sector_models(const DiracBVP& bvp);

// order 0: γ ω₀ e^{iτλ}; order 1: γ (ω₀ + ω₁/λ) e^{iτλ}.
cplx delta_model(cplx lambda, const SectorModel& model, int order);

// Δ(λ) e^{-iτλ} / γ for λ inside the model's sector.
cplx scaled_determinant(const DiracBVP& bvp, cplx lambda, const SectorModel& model,
                        const StepControl& ctrl = {});

}  // namespace dspec

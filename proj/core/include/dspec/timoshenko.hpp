#pragma once

#include <string>
#include <vector>

#include "dspec/spectrum.hpp"

namespace dspec {

inline constexpr double kNuTol = 1e-8;
inline constexpr int kBeamResampleCells = 128;

// Profiles are sampled on a uniform grid over [0, length]; a single sample means a constant profile.
struct BeamModel {
  double length = 1.0;
  RVector rho, I_rho, K, EI;
  CVector p1, p2;
  cplx alpha1, alpha2, beta1, beta2;
};

BeamModel constant_beam(double length, double rho, double I_rho, double K, double EI, cplx alpha1, cplx alpha2,
                        cplx beta1 = 0.0, cplx beta2 = 0.0, cplx p1 = 0.0, cplx p2 = 0.0);

struct ReductionResult {
  double b1 = 0.0, b2 = 0.0;
  std::vector<double> x;  // physical grid
  RVector gamma, t, h1, h2, dh1, dh2;
  double h1_end = 0.0, h2_end = 0.0, dh1_end = 0.0, dh2_end = 0.0;
  cplx p1_end, p2_end;
  DiracBVP dirac;

  // Physical abscissa x(t) by monotone cubic inverse interpolation.
  double x_of_t(double t) const;
};

ReductionResult reduce_to_dirac(const BeamModel& beam, int resample_cells = kBeamResampleCells);

struct Inequality {
  std::string name;
  cplx value;
  bool holds = false;
};

struct BeamConditions {
  cplx det_TB, det_TmB;
  bool weak_complete = false;    // both products differ from β₁β₂
  bool riesz = false;            // additionally β = 0 with bounded damping and Lipschitz h
  bool nonweak_applicable = false;
  bool nonweak_complete = false;
  char case_j[2] = {'-', '-'};  // which of (a), (b), (c) holds for j = 1, 2
  std::vector<Inequality> checks;
};

BeamConditions beam_conditions(const BeamModel& beam);
BeamConditions beam_conditions(const ReductionResult& red, const BeamModel& beam);

SpectrumSlice beam_spectrum(const BeamModel& beam, const Rect& region, double tol = 1e-10,
                            const StepControl& ctrl = {});

}  // namespace dspec

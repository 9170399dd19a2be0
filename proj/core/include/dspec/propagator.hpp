#pragma once

#include <functional>
#include <vector>

#include "dspec/system_model.hpp"

namespace dspec {

struct StepControl {
  int base_steps = 16;
  long max_steps = 4'000'000;
  bool estimate_error = false;
};

struct StepStats {
  long steps = 0;
  double error_estimate = 0.0;
};

struct Propagation {
  cplx lambda;
  std::vector<double> x_points;
  std::vector<CMatrix> matrices;
  StepStats step_stats;
};

class StepCapExceeded : public NumericalError {
public:
  StepCapExceeded(long requested, double estimate);
  long requested;
  double error_estimate;
};

// Steps per unit length for the given λ.
long step_budget(const DiracBVP& bvp, cplx lambda, const StepControl& ctrl);

// Φ(x,λ) with Φ(0,λ)=I, solving Φ' = iB(λ - Q(x))Φ.
Propagation fundamental_matrix(const DiracBVP& bvp, cplx lambda, const std::vector<double>& x_points,
                               const StepControl& ctrl = {});
CMatrix monodromy(const DiracBVP& bvp, cplx lambda, const StepControl& ctrl = {});

// exp(i tr(B) λ x - i ∫_0^x tr(BQ)) for x = 1.
cplx liouville_determinant(const DiracBVP& bvp, cplx lambda);

cplx char_determinant(const DiracBVP& bvp, cplx lambda, const StepControl& ctrl = {});
// C + DΦ(1,λ).
CMatrix char_matrix(const DiracBVP& bvp, cplx lambda, const StepControl& ctrl = {});

struct GaugeRecord {
  std::vector<double> x;
  std::vector<CMatrix> W;
};

struct GaugeResult {
  DiracBVP bvp;
  GaugeRecord record;
};

inline constexpr int kGaugeCells = 8192;

// Removes the diagonal blocks of Q (entries with b_j = b_k) by y = W(x)·y', iB⁻¹W' = Q₁W.
GaugeResult gauge_normalize(const DiracBVP& bvp, int min_cells = kGaugeCells,
                            const StepControl& ctrl = {});

// Generic 4th-order Magnus integration of Y' = A(x)Y, Y(0)=I on [0,1].
using Generator = std::function<CMatrix(double)>;
std::vector<CMatrix> integrate_linear(const Generator& A, int n, const std::vector<double>& breakpoints,
                                      bool piecewise_constant, const std::vector<double>& x_points,
                                      long steps_per_unit, StepStats* stats = nullptr);

}  // namespace dspec

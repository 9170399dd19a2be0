#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dspec/propagator.hpp"

namespace dspec {

inline constexpr double kMaxCharCondition = 1e12;

struct GreenEvaluation {
  cplx lambda;
  std::vector<std::pair<double, double>> pairs;  // (x, t)
  std::vector<CMatrix> values;                   // at t = x the value is G(x, x-0)
  double condition = 0.0;                        // of C + DΦ(1)
};

GreenEvaluation green_function(const DiracBVP& bvp, cplx lambda, const std::vector<std::pair<double, double>>& pairs,
                               const StepControl& ctrl = {});
// G(x, x-0) - G(x, x+0) at each x.
std::vector<CMatrix> green_jump(const DiracBVP& bvp, cplx lambda, const std::vector<double>& xs,
                                const StepControl& ctrl = {});

// y = (L - λ)⁻¹ f for f sampled on the uniform grid (n×(N+1), column i at x = i/N).
CMatrix apply_resolvent(const DiracBVP& bvp, cplx lambda, const CMatrix& f, const StepControl& ctrl = {});

// tr ∫ [G₁(x, x-0) - G₂(x, x-0)] dx by composite Simpson on N intervals.
cplx trace_formula_diff(const DiracBVP& bvp1, const DiracBVP& bvp2, cplx lambda, int N = 2048,
                        const StepControl& ctrl = {});
// Trace of the trapezoid Nyström matrix of the kernel (diagonal taken as the mean of both sides).
cplx nystrom_trace(const DiracBVP& bvp, cplx lambda, int N = 2048, const StepControl& ctrl = {});

struct SValueControl {
  int count = 80;
  int power_iterations = 6;
  std::uint64_t seed = 0;
  StepControl step;
};

struct SValueProfile {
  std::vector<double> values;                   // descending
  std::vector<double> weights;                  // |b_j|
  std::vector<std::vector<double>> series;      // s_{j,k}, k = 1, 2, ...
  std::vector<std::vector<double>> normalized;  // s_{j,k}·πk/|b_j|
};

SValueProfile svalue_profile(const DiracBVP& bvp, cplx lambda, int N, const SValueControl& sc = {});

// Greedy split of descending values into series with predicted s_{j,k} = |b_j|/(πk).
void assign_series(SValueProfile& p);

}  // namespace dspec

#pragma once

#include <cstdint>
#include <vector>

#include "dspec/propagator.hpp"
#include "dspec/spectrum.hpp"

namespace dspec {

struct RootControl {
  double derivative_radius = 0.0;  // radius of the Cauchy stencil in λ; 0 selects 0.1 / Σ|b_j|
  int stencil = 0;                 // points on the stencil circle; 0 selects max(16, 4m)
  double rank_tol = 1e-8;
  StepControl step;
};

// Uniform grid x_i = i/N, i = 0..N.
std::vector<double> uniform_grid(int N);

// One Jordan chain; functions[p] is n×(N+1), column i holding u_p(x_i).
struct RootChain {
  cplx eigenvalue;
  std::vector<double> x;
  std::vector<CMatrix> functions;
  std::vector<CVector> coefficients;  // u_p = Σ_q ∂^qΦ/q! · coefficients[p-q]
};

struct DerivativeStack {
  std::vector<CMatrix> A;                 // A_p = ∂^p(C + DΦ(1))/p!
  std::vector<std::vector<CMatrix>> Phi;  // Phi[p][i] = ∂^pΦ(x_i)/p!
};

DerivativeStack derivative_stack(const DiracBVP& bvp, cplx lambda, int order, const std::vector<double>& grid,
                                 const RootControl& rc = {});

std::vector<RootChain> root_chains(const DiracBVP& bvp, cplx eigenvalue, int multiplicity,
                                   const std::vector<double>& grid, const RootControl& rc = {});

// Orthonormal basis of the span of ∂^p(Φ·adj(C + DΦ(1)))/p!, p < multiplicity.
std::vector<CMatrix> adjugate_span(const DiracBVP& bvp, cplx eigenvalue, int multiplicity,
                                   const std::vector<double>& grid, const RootControl& rc = {});

struct ChainResidual {
  double ode = 0.0;       // max of the finite-difference chain residual, relative to max|u|
  double boundary = 0.0;  // max ‖Cu_p(0) + Du_p(1)‖ / ‖u_p‖
};
ChainResidual chain_residual(const DiracBVP& bvp, const RootChain& chain);

cplx l2_inner(const CMatrix& u, const CMatrix& v);  // ∫⟨u, v⟩ by the trapezoid rule on [0,1]
double l2_norm(const CMatrix& u);

DiracBVP adjoint_bvp(const DiracBVP& bvp);
// Largest relative defect of ⟨B⁻¹y(1), g(1)⟩ = ⟨B⁻¹y(0), g(0)⟩ over random boundary-value pairs.
double green_identity_defect(const DiracBVP& bvp, const DiracBVP& adjoint, int pairs = 20, std::uint64_t seed = 0);

struct GramReport {
  CMatrix gram;
  std::vector<cplx> row_eigenvalues, col_eigenvalues;
  double max_cross = 0.0;    // largest normalized entry between different eigenvalues
  double max_offdiag = 0.0;  // largest normalized entry off the diagonal
  std::vector<double> block_conditions;
};

GramReport minimality_gram(const std::vector<RootChain>& chains, const std::vector<RootChain>& adjoint_chains);
// Normalized Gram matrix of a system against itself.
GramReport self_gram(const std::vector<RootChain>& chains);

enum class ProbeKind { random_trig, reflection };

struct DefectControl {
  int grid = 512;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  ProbeKind kind = ProbeKind::random_trig;
  RootControl roots;
};

struct DefectReport {
  int root_functions = 0;
  std::vector<double> residuals;
  double mean_residual = 0.0;
  bool heuristic = true;
};

DefectReport defect_probe(const DiracBVP& bvp, const Rect& region, int n_test, const DefectControl& dc = {});
// Relative least-squares residual of each test function against the span of the chains.
std::vector<double> projection_residuals(const std::vector<RootChain>& chains, const std::vector<CMatrix>& tests);

}  // namespace dspec

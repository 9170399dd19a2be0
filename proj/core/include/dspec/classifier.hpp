#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dspec/asymptotics.hpp"

namespace dspec {

inline constexpr double kDetTol = 1e-10;
inline constexpr double kTriangleMargin = 1e-9;

struct RegularityReport {
  std::vector<cplx> sector_dets;
  std::vector<bool> sector_nonzero;
  bool regular = false;
  bool weakly_regular = false;
  std::optional<std::array<cplx, 3>> witness_triple;
  bool degenerate = false;              // Δ ≡ 0 for the given potential
  bool degenerate_unperturbed = false;  // Δ ≡ 0 with the potential replaced by zero
};

RegularityReport classify_regularity(const DiracBVP& bvp, const StepControl& ctrl = {});

// True when the origin lies strictly inside the triangle z1 z2 z3 (barycentric signs with margin).
bool triangle_contains_origin(cplx z1, cplx z2, cplx z3, double margin = kTriangleMargin);

enum class CompletenessStatus { certified_complete, certified_incomplete, inconclusive };

enum class CompletenessRule {
  none,
  weak_regularity,            // nonzero det T on a triangle of sectors around 0
  two_by_two_minors,          // n = 2 minors J_jk of (C D) with endpoint values of q12, q21
  first_component_dirichlet,  // y1(0) = 0 with sign-separated Re b_j
  four_by_four_pattern,       // 4×4 pattern with B = diag(-b1, b1, -b2, b2)
  normal_boundary,            // CBC* = DBD*
  omega_triple,               // |ω₀|+|ω₁| ≠ 0 on a triangle of admissible points around 0
  antipodal_pair,             // |ω₀(±z)|+|ω₁(±z)| ≠ 0
  reflection_symmetry,        // y(0) = Ay(1), AB + BA = 0, Q(1-x) = A⁻¹Q(x)A near 0
  decoupled_dirichlet         // y_k(0) = 0 and q_kj ≡ 0 near 0 for j ≠ k
};

std::string to_string(CompletenessStatus s);
std::string to_string(CompletenessRule r);

struct OmegaWitness {
  cplx z;
  cplx omega0;
  std::optional<cplx> omega1;
};

struct NamedValue {
  std::string name;
  cplx value;
};

struct IncompletenessWitness {
  CompletenessRule rule = CompletenessRule::none;
  CMatrix A;           // reflection matrix (reflection_symmetry)
  int component = -1;  // vanishing component (decoupled_dirichlet)
  double epsilon = 0.0;
};

struct CompletenessCertificate {
  CompletenessStatus status = CompletenessStatus::inconclusive;
  CompletenessRule rule = CompletenessRule::none;
  std::vector<OmegaWitness> points;
  std::vector<NamedValue> values;
  std::optional<IncompletenessWitness> incompleteness;
  // Direction θ such that ω₀ and ω₁ vanish on the open half-plane θ < arg z < θ + π.
  std::optional<double> vanishing_half_plane;
};

CompletenessCertificate completeness_certificate(const DiracBVP& bvp);
std::optional<IncompletenessWitness> incompleteness_witness(const DiracBVP& bvp);

// Individual shape rules; each returns nullopt when the shape does not apply.
std::optional<CompletenessCertificate> two_by_two_rule(const DiracBVP& bvp);
std::optional<CompletenessCertificate> first_component_rule(const DiracBVP& bvp);
std::optional<CompletenessCertificate> four_by_four_rule(const DiracBVP& bvp);
std::optional<CompletenessCertificate> omega_search(const DiracBVP& bvp);
std::optional<CompletenessCertificate> antipodal_search(const DiracBVP& bvp);
std::optional<IncompletenessWitness> reflection_witness(const DiracBVP& bvp);
std::optional<IncompletenessWitness> decoupled_dirichlet_witness(const DiracBVP& bvp);

struct FourByFourEntries {
  cplx d1, d2, d3, d4;
  cplx q12, q21, q34, q43;  // values at x = 1
};
// The two non-vanishing conditions of the 4×4 pattern, and their pairwise reformulation.
std::pair<bool, bool> four_by_four_conditions(const FourByFourEntries& e);
bool four_by_four_pairwise(const FourByFourEntries& e);

inline constexpr double kNormalTol = 1e-10;
bool normality_check(const WeightMatrix& B, const CMatrix& C, const CMatrix& D, double tol = kNormalTol);

enum class Dissipativity { dissipative, accumulative, selfadjoint, neither, not_dirac_type };
std::string to_string(Dissipativity d);
Dissipativity dissipativity_check(const DiracBVP& bvp);

enum class RieszKind { basis_with_parentheses, no_basis, unknown };
enum class RieszRule { none, split_pairs, block_diagonal, scalar_weight };
std::string to_string(RieszKind k);
std::string to_string(RieszRule r);

struct RieszVerdict {
  RieszKind kind = RieszKind::unknown;
  RieszRule rule = RieszRule::none;
  std::vector<double> angles;              // grouping rays in [0, 2π)
  std::vector<cplx> lattice_steps;         // eigenvalues of the normal model are 2πk / step
  std::vector<std::pair<int, int>> pairs;  // value-block pairs (split_pairs)
};

RieszVerdict riesz_verdict(const DiracBVP& bvp);

struct SynthesisVerdict {
  bool applicable = false;
  bool admits_synthesis = false;
  Dissipativity dissipativity = Dissipativity::not_dirac_type;
  std::vector<double> ladder;      // t values
  std::vector<double> log_abs_delta;
  double tau = 0.0;
  double growth_rate = 0.0;  // fitted slope of log|Δ| along the ray
  double power = 0.0;        // fitted s in |Δ| ~ e^{τt} / t^s
};

SynthesisVerdict synthesis_verdict(const DiracBVP& bvp, const CompletenessCertificate& completeness,
                                   const StepControl& ctrl = {});

}  // namespace dspec

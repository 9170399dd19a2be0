#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dspec/types.hpp"

namespace dspec {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct WeightMatrix {
  std::vector<cplx> b;

  int n() const { return static_cast<int>(b.size()); }
  CMatrix matrix() const;
  double max_abs() const;
  cplx trace() const;
};

enum class PotentialKind { zero, constant, grid };

// Q(x) on [0,1]: identically zero, constant, or sampled on m+1 equispaced nodes.
class PotentialField {
public:
  static PotentialField zero(int n);
  static PotentialField constant(CMatrix q, std::optional<BoolMatrix> continuity = std::nullopt);
  static PotentialField grid(std::vector<CMatrix> samples, int interp,
                             std::optional<BoolMatrix> continuity = std::nullopt);

  PotentialKind kind() const { return kind_; }
  int n() const { return n_; }
  int interp() const { return interp_; }
  int cells() const { return static_cast<int>(samples_.size()) - 1; }
  const std::vector<CMatrix>& samples() const { return samples_; }
  const BoolMatrix& continuity() const { return continuity_; }

  CMatrix at(double x) const;
  CMatrix at0() const;
  CMatrix at1() const;

  // Constant on every integration piece (zero, constant, or step-interpolated grid).
  bool piecewise_constant() const;
  // Abscissae where the interpolant may lose smoothness, always including 0 and 1.
  std::vector<double> breakpoints() const;

  // Exact integral of the interpolant over [0,1].
  CMatrix integral() const;
  bool is_zero() const;

  PotentialField with_continuity(BoolMatrix flags) const;
  PotentialField permuted(const std::vector<int>& perm) const;
  PotentialField adjoint() const;

private:
  PotentialKind kind_ = PotentialKind::zero;
  int n_ = 0;
  int interp_ = 1;
  std::vector<CMatrix> samples_;
  BoolMatrix continuity_;
};

struct BoundaryPair {
  CMatrix C;
  CMatrix D;

  // The n×2n compound (C D).
  CMatrix compound() const;
};

struct DiracBVP {
  WeightMatrix weight;
  PotentialField potential;
  BoundaryPair boundary;

  int n() const { return weight.n(); }
  const CMatrix& C() const { return boundary.C; }
  const CMatrix& D() const { return boundary.D; }
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_bvp(const DiracBVP& bvp);
// Throws ValidationError listing every violation.
void require_valid(const DiracBVP& bvp);

inline constexpr double kImTol = 1e-12;
bool is_dirac_type(const WeightMatrix& B, double im_tol = kImTol);

struct ValueBlock {
  cplx value;
  std::vector<int> indices;
};

// Groups equal b_j (exact comparison) in order of first appearance.
std::vector<ValueBlock> value_blocks(const WeightMatrix& B);

struct CanonicalOrder {
  DiracBVP bvp;
  std::vector<int> permutation;  // new position k holds original coordinate permutation[k]
};

// Renumbers coordinates so that equal b_j are contiguous. Rows of C and D are permuted
// together with the columns, which keeps Δ unchanged including its sign.
CanonicalOrder canonical_block_order(const DiracBVP& bvp);

DiracBVP make_bvp(std::vector<cplx> b, CMatrix C, CMatrix D,
                  std::optional<PotentialField> q = std::nullopt);

}  // namespace dspec

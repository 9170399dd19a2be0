#pragma once

#include <vector>

#include "dspec/system_model.hpp"

namespace dspec {

struct Sector {
  double phi_start = 0.0;  // open arc (phi_start, phi_end), angles in [0, 2π) with phi_end possibly > 2π
  double phi_end = 0.0;
  cplx representative;     // unit point at the angular midpoint
  std::vector<int> signs;  // sign of Re(i b_j z) for z in the sector

  double width() const { return phi_end - phi_start; }
  cplx point(double fraction) const;  // unit point at phi_start + fraction·width
  bool contains_angle(double phi) const;
};

struct SectorFan {
  std::vector<double> lines;  // angles in [0, π)
  std::vector<Sector> sectors;

  int size() const { return static_cast<int>(sectors.size()); }
  // Index of the open sector containing λ ≠ 0, or -1 when λ lies on a line.
  int sector_of(cplx lambda) const;
};

SectorFan compute_fan(const WeightMatrix& B);

bool is_admissible(cplx z, const WeightMatrix& B);
bool is_feasible(cplx z, const WeightMatrix& B);

struct TMatrix {
  cplx z;
  CMatrix matrix;
};

enum class SwapKind {
  c_to_c,  // T^{c_j→c_k}: column j (a C-column) replaced by c_k
  d_to_d   // T^{d_k→d_j}: column k (a D-column) replaced by d_j
};

struct Swap {
  SwapKind kind;
  int j;  // index with Re(i b_j z) < 0
  int k;  // index with Re(i b_k z) > 0
};

TMatrix build_T(cplx z, const CMatrix& C, const CMatrix& D, const WeightMatrix& B);
TMatrix build_T_swapped(cplx z, const CMatrix& C, const CMatrix& D, const WeightMatrix& B,
                        const Swap& swap);

// Sign of Re(i b_j z); throws PreconditionError if z is not admissible.
std::vector<int> sign_pattern(cplx z, const WeightMatrix& B);

}  // namespace dspec

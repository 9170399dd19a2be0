#pragma once

#include <functional>
#include <vector>

#include "dspec/classifier.hpp"
#include "dspec/propagator.hpp"

namespace dspec {

struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(cplx z) const { return z.real() > x0 && z.real() < x1 && z.imag() > y0 && z.imag() < y1; }
  Rect dilated(double d) const { return {x0 - d, x1 + d, y0 - d, y1 + d}; }
};

struct Eigenvalue {
  cplx value;
  int multiplicity = 1;
};

struct UnresolvedCell {
  Rect cell;
  int count = 0;
};

struct SpectrumSlice {
  Rect region;
  std::vector<Eigenvalue> eigenvalues;
  int total_count = 0;
  double residual = 0.0;  // max |Δ| at refined roots
  std::vector<UnresolvedCell> unresolved;
};

// Raised when a contour passes through (or numerically onto) a zero.
class BoundaryZero : public NumericalError {
public:
  using NumericalError::NumericalError;
};

using AnalyticFn = std::function<cplx(cplx)>;

struct ContourControl {
  double frequency = 2.0;  // expected phase rate of f per unit length
  int max_dilations = 5;
  double dilation = 1e-3;
};

// Winding number of f around the closed polygon through the given vertices.
int winding_number(const AnalyticFn& f, const std::vector<cplx>& vertices, double frequency);
int winding_on_circle(const AnalyticFn& f, cplx center, double radius);

// Winding around the rectangle boundary; dilates on boundary zeros. The used region is written back.
int count_zeros(const AnalyticFn& f, Rect& region, const ContourControl& cc = {});
int count_zeros(const DiracBVP& bvp, const Rect& region, const StepControl& ctrl = {});

SpectrumSlice locate_zeros(const AnalyticFn& f, const Rect& region, double tol, const ContourControl& cc = {});
SpectrumSlice locate_eigenvalues(const DiracBVP& bvp, const Rect& region, double tol = 1e-10,
                                 const StepControl& ctrl = {});

struct RieszBlocks {
  std::vector<double> angles;
  double epsilon = 0.0;
  std::vector<std::vector<int>> blocks;
  std::vector<int> ray;  // ray index per block, -1 when the block is near no ray
};

RieszBlocks group_blocks(const std::vector<cplx>& eigs, const std::vector<double>& angles, double epsilon);

// Normal-model lattice 2πk/step for |k| ≤ K, sorted by real then imaginary part.
std::vector<cplx> reference_spectrum(const RieszVerdict& verdict, int K);

}  // namespace dspec

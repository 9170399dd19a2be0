#pragma once

#include <random>
#include <string>

#include "dspec/io.hpp"

namespace dspec::test {

inline std::string fixture(const std::string& name) { return std::string(DSPEC_FIXTURE_DIR) + "/" + name + ".json"; }

inline DiracBVP load(const std::string& name) { return load_bvp(fixture(name)); }

inline CMatrix I(int n) { return CMatrix::Identity(n, n); }

inline CMatrix mat(std::initializer_list<std::initializer_list<cplx>> rows) {
  CMatrix m(rows.size(), rows.begin()->size());
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (cplx v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

inline DiracBVP periodic(std::vector<cplx> b) {
  const int n = static_cast<int>(b.size());
  return make_bvp(std::move(b), I(n), -I(n));
}

inline DiracBVP dirichlet() {
  return make_bvp({-1.0, 1.0}, mat({{1, 1}, {0, 0}}), mat({{0, 0}, {1, 1}}));
}

// B = -i diag(e^{iθ}, e^{-iθ}), q12 = -e^{-iθ}, y1(0) = 0, y1(1) = 0.
inline DiracBVP levin(double theta, bool with_potential = true) {
  const cplx e = std::polar(1.0, theta);
  CMatrix q = CMatrix::Zero(2, 2);
  if (with_potential) q(0, 1) = -std::conj(e);
  BoolMatrix flags = BoolMatrix::Constant(2, 2, true);
  return make_bvp({-kI * e, -kI * std::conj(e)}, mat({{1, 0}, {0, 0}}), mat({{0, 0}, {1, 0}}),
                  PotentialField::constant(q, flags));
}

inline cplx random_complex(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g;
  return scale * cplx(g(rng), g(rng));
}

inline CMatrix random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  CMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = random_complex(rng, scale);
  return m;
}

}  // namespace dspec::test

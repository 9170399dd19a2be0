#include <doctest.h>

#include "dspec/linalg.hpp"
#include "dspec/propagator.hpp"
#include "support.hpp"

using namespace dspec;
using namespace dspec::test;

namespace {

DiracBVP smooth_grid_bvp(int cells) {
  std::vector<CMatrix> s;
  for (int i = 0; i <= cells; ++i) {
    const double x = static_cast<double>(i) / cells;
    s.push_back(mat({{std::cos(3 * x), cplx(1.0, x)}, {std::exp(-x), cplx(0.0, std::sin(2 * x))}}));
  }
  return make_bvp({-1.0, 2.0}, I(2), -I(2), PotentialField::grid(s, 1));
}

}  // namespace

TEST_CASE("free propagation is exp(iBλx)") {
  const DiracBVP bvp = periodic({-1.0, 1.0});
  const CMatrix phi = monodromy(bvp, kPi);
  CHECK((phi - mat({{-1, 0}, {0, -1}})).norm() < 1e-12);
  const Propagation p = fundamental_matrix(bvp, cplx(2.0, 0.5), {0.0, 0.25, 1.0});
  CHECK((p.matrices[0] - I(2)).norm() == 0.0);
  for (std::size_t i = 0; i < p.x_points.size(); ++i) {
    const double x = p.x_points[i];
    const cplx l(2.0, 0.5);
    CHECK(std::abs(p.matrices[i](0, 0) - std::exp(-kI * l * x)) < 1e-12);
    CHECK(std::abs(p.matrices[i](1, 1) - std::exp(kI * l * x)) < 1e-12);
  }
}

TEST_CASE("scalar constant potential") {
  const cplx q(0.7, -0.2), l(1.3, 0.4);
  const DiracBVP bvp = make_bvp({1.0}, I(1), CMatrix::Zero(1, 1), PotentialField::constant(CMatrix::Constant(1, 1, q)));
  const Propagation p = fundamental_matrix(bvp, l, {0.5, 1.0});
  CHECK(std::abs(p.matrices[0](0, 0) - std::exp(kI * (l - q) * 0.5)) < 1e-13);
  CHECK(std::abs(p.matrices[1](0, 0) - std::exp(kI * (l - q))) < 1e-13);
}

TEST_CASE("propagated column reproduces the sine-shaped eigenfunction") {
  const DiracBVP bvp = levin(kPi / 2);
  for (int n : {1, 2, 5}) {
    const double l = kPi * n;
    std::vector<double> xs;
    for (int i = 0; i <= 10; ++i) xs.push_back(i / 10.0);
    const Propagation p = fundamental_matrix(bvp, l, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const CVector u = p.matrices[i].col(1) * l;
      CHECK(std::abs(u(0) - std::sin(l * xs[i])) < 1e-10 * l);
      CHECK(std::abs(u(1) - l * std::exp(-kI * l * xs[i])) < 1e-10 * l);
    }
  }
}

TEST_CASE("characteristic determinants of closed-form fixtures") {
  const DiracBVP per = periodic({-1.0, 1.0});
  const DiracBVP dir = dirichlet();
  CHECK(std::abs(char_determinant(per, kPi) - 4.0) < 1e-12);
  CHECK(std::abs(char_determinant(dir, kPi / 2) - 2.0 * kI) < 1e-12);
  for (cplx l : {cplx(0.3, 0.1), cplx(-2.0, 1.5), cplx(7.0, -0.5)}) {
    CHECK(std::abs(char_determinant(per, l) - (2.0 - 2.0 * std::cos(l))) < 1e-11 * std::abs(std::exp(std::abs(l.imag()))));
    CHECK(std::abs(char_determinant(dir, l) - 2.0 * kI * std::sin(l)) < 1e-11 * std::abs(std::exp(std::abs(l.imag()))));
  }
  const DiracBVP vol = make_bvp({1.0}, I(1), CMatrix::Zero(1, 1));
  CHECK(std::abs(char_determinant(vol, cplx(4.0, 2.0)) - 1.0) < 1e-15);
}

TEST_CASE("Liouville identity") {
  std::mt19937_64 rng(17);
  const DiracBVP g = smooth_grid_bvp(32);
  const DiracBVP c = make_bvp({1.0, kI, -0.5}, I(3), -I(3), PotentialField::constant(random_matrix(rng, 3, 3)));
  for (const DiracBVP* bvp : {&g, &c}) {
    for (int k = 0; k < 5; ++k) {
      const cplx l = random_complex(rng, 4.0);
      const CMatrix phi = monodromy(*bvp, l);
      const cplx rhs = liouville_determinant(*bvp, l);
      CHECK(std::abs(phi.determinant() - rhs) <= 1e-9 * linalg::column_norm_product(phi));
    }
  }
}

TEST_CASE("fourth-order convergence on a smooth potential") {
  const DiracBVP bvp = smooth_grid_bvp(4);
  const cplx l(6.0, 0.3);
  auto delta = [&](int base) {
    StepControl c;
    c.base_steps = base;
    return char_determinant(bvp, l, c);
  };
  const cplx d1 = delta(16), d2 = delta(32), d3 = delta(64);
  const double ratio = std::abs(d1 - d2) / std::abs(d2 - d3);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("Gronwall envelope") {
  const DiracBVP bvp = smooth_grid_bvp(16);
  const cplx l(3.0, -2.0);
  std::vector<double> xs{0.2, 0.5, 1.0};
  const Propagation p = fundamental_matrix(bvp, l, xs);
  const double bq = 2.0 * 3.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(p.matrices[i].cwiseAbs().maxCoeff() <= std::exp((std::abs(l) * 2.0 + bq) * xs[i]));
}

TEST_CASE("step cap is reported") {
  StepControl c;
  c.max_steps = 10;
  CHECK_THROWS_AS(char_determinant(smooth_grid_bvp(8), 1000.0, c), StepCapExceeded);
}

TEST_CASE("gauge of a constant diagonal potential") {
  const double c = 0.8;
  CMatrix q = CMatrix::Zero(2, 2);
  q(0, 0) = c;
  const DiracBVP bvp = make_bvp({-1.0, 1.0}, I(2), -I(2), PotentialField::constant(q));
  const GaugeResult g = gauge_normalize(bvp);
  CHECK(g.bvp.potential.is_zero());
  const CMatrix expected = -mat({{std::exp(kI * c), 0}, {0, 1}});
  CHECK((g.bvp.D() - expected).norm() < 1e-10);
  const std::size_t mid = g.record.x.size() / 2;
  CHECK(std::abs(g.record.W[mid](0, 0) - std::exp(kI * c * g.record.x[mid])) < 1e-10);
}

TEST_CASE("gauge leaves off-diagonal potentials alone") {
  const DiracBVP bvp = levin(kPi / 2);
  const GaugeResult g = gauge_normalize(bvp);
  CHECK((g.bvp.D() - bvp.D()).norm() == 0.0);
  CHECK((g.bvp.potential.at(0.5) - bvp.potential.at(0.5)).norm() == 0.0);
}

TEST_CASE("gauge preserves the characteristic determinant") {
  std::mt19937_64 rng(23);
  const DiracBVP bvp = make_bvp({-1.0, 1.0, 2.0}, random_matrix(rng, 3, 3), random_matrix(rng, 3, 3),
                                PotentialField::constant(random_matrix(rng, 3, 3, 0.7)));
  const DiracBVP g = gauge_normalize(bvp).bvp;
  for (int k = 0; k < 10; ++k) {
    const cplx l = random_complex(rng, 3.0);
    const cplx a = char_determinant(bvp, l), b = char_determinant(g, l);
    CHECK(std::abs(a - b) <= 1e-8 * std::abs(a));
  }
}

#include <doctest.h>

#include <algorithm>

#include "dspec/spectrum.hpp"
#include "support.hpp"

using namespace dspec;
using namespace dspec::test;

namespace {

void check_values(const SpectrumSlice& s, std::vector<cplx> expected, int multiplicity, double tol) {
  REQUIRE(s.eigenvalues.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(s.eigenvalues[i].value - expected[i]) < tol);
    CHECK(s.eigenvalues[i].multiplicity == multiplicity);
  }
}

int total_multiplicity(const SpectrumSlice& s) {
  int m = 0;
  for (const auto& e : s.eigenvalues) m += e.multiplicity;
  return m;
}

}  // namespace

TEST_CASE("argument principle on closed forms") {
  const AnalyticFn sine = [](cplx z) { return 2.0 * kI * std::sin(z); };
  Rect r{-0.5, 3.5, -1, 1};
  CHECK(count_zeros(sine, r) == 2);
  const AnalyticFn cosine = [](cplx z) { return 2.0 - 2.0 * std::cos(z); };
  Rect r2{-1, 1, -1, 1};
  CHECK(count_zeros(cosine, r2) == 2);
  Rect r3{1, 2, -1, 1};
  CHECK(count_zeros(sine, r3) == 0);

  CHECK(count_zeros(dirichlet(), {-0.5, 3.5, -1, 1}) == 2);
  CHECK(count_zeros(periodic({-1.0, 1.0}), {-1, 1, -1, 1}) == 2);
}

TEST_CASE("boundary zeros trigger dilation") {
  const AnalyticFn sine = [](cplx z) { return std::sin(z); };
  Rect r{0.0, 2.0, -1, 1};
  const int k = count_zeros(sine, r);
  CHECK(r.x0 < 0.0);
  CHECK(k == 1);
}

TEST_CASE("winding on circles") {
  const AnalyticFn f = [](cplx z) { return (z - 0.1) * (z - 0.1) * (z + 2.0); };
  CHECK(winding_on_circle(f, 0.0, 0.5) == 2);
  CHECK(winding_on_circle(f, 0.0, 3.0) == 3);
  CHECK(winding_on_circle(f, 5.0, 1.0) == 0);
}

TEST_CASE("periodic spectrum has double eigenvalues") {
  const auto s = locate_eigenvalues(load("periodic"), {-7, 7, -1, 1}, 1e-10);
  check_values(s, {-2 * kPi, 0.0, 2 * kPi}, 2, 1e-8);
  CHECK(s.total_count == 6);
  CHECK(s.unresolved.empty());
}

TEST_CASE("two-point example spectrum") {
  const auto s = locate_eigenvalues(load("levin_half_pi"), {0.5, 9.9, -1, 1}, 1e-10);
  check_values(s, {kPi, 2 * kPi, 3 * kPi}, 1, 1e-7);
}

TEST_CASE("volterra problem has no eigenvalues") {
  const auto s = locate_eigenvalues(load("volterra"), {-10, 10, -10, 10}, 1e-10);
  CHECK(s.eigenvalues.empty());
  CHECK(s.total_count == 0);
}

TEST_CASE("dirichlet spectrum and residual") {
  const auto s = locate_eigenvalues(load("dirichlet"), {-0.5, 6.5, -1, 1}, 1e-10);
  check_values(s, {0.0, kPi, 2 * kPi}, 1, 1e-9);
  CHECK(s.residual < 1e-7);
}

TEST_CASE("counts are additive over a partition") {
  const std::vector<DiracBVP> cases = {load("mixed_weights"), load("levin_third_pi"), load("jordan"),
                                       levin(kPi / 2)};
  for (const auto& bvp : cases) {
    const Rect whole{-6.1, 6.3, -2.2, 2.4};
    const int total = count_zeros(bvp, whole);
    const double xm = 0.13, ym = 0.07;
    const int parts = count_zeros(bvp, {whole.x0, xm, whole.y0, ym}) + count_zeros(bvp, {xm, whole.x1, whole.y0, ym}) +
                      count_zeros(bvp, {whole.x0, xm, ym, whole.y1}) + count_zeros(bvp, {xm, whole.x1, ym, whole.y1});
    CHECK(parts == total);
    const auto s = locate_eigenvalues(bvp, whole, 1e-10);
    CHECK(total_multiplicity(s) == s.total_count);
    CHECK(s.total_count == total);
  }
}

TEST_CASE("refined roots are interior with small residual") {
  const auto bvp = load("mixed_weights");
  const Rect r{-5, 5, -3, 3};
  const auto s = locate_eigenvalues(bvp, r, 1e-10);
  REQUIRE_FALSE(s.eigenvalues.empty());
  double scale = 0.0;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j)
      scale = std::max(scale, std::abs(char_determinant(bvp, {r.x0 + r.width() * i / 20, r.y0 + r.height() * j / 20})));
  for (const auto& e : s.eigenvalues) {
    CHECK(r.contains(e.value));
    CHECK(std::abs(char_determinant(bvp, e.value)) < 1e-7 * scale);
  }
}

TEST_CASE("gauge normalization preserves eigenvalues") {
  CMatrix q = mat({{0.3, cplx(0.5, 0.1)}, {0.2, cplx(0.0, -0.4)}});
  const auto bvp = make_bvp({1.0, 1.0, -2.0}, I(3), -I(3),
                            PotentialField::constant(
                                [&] {
                                  CMatrix m = CMatrix::Zero(3, 3);
                                  m.topLeftCorner(2, 2) = q;
                                  m(0, 2) = 0.4;
                                  m(2, 1) = -0.3;
                                  return m;
                                }()));
  const auto g = gauge_normalize(bvp, 1024);
  const Rect r{-3, 3, -1.5, 1.5};
  const auto a = locate_eigenvalues(bvp, r, 1e-10);
  const auto b = locate_eigenvalues(g.bvp, r, 1e-10);
  REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
  for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
    CHECK(std::abs(a.eigenvalues[i].value - b.eigenvalues[i].value) < 1e-6);
}

TEST_CASE("accumulative problems have no eigenvalues in the upper half-plane") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int i = 0; i < 5; ++i) {
    CMatrix D = CMatrix::Zero(2, 2);
    D(0, 0) = std::polar(1.0 / u(rng), 2 * kPi * u(rng));
    D(1, 1) = std::polar(u(rng), 2 * kPi * u(rng));
    const auto bvp = make_bvp({-1.0, 1.5}, I(2), D);
    REQUIRE(dissipativity_check(bvp) == Dissipativity::accumulative);
    const auto s = locate_eigenvalues(bvp, {-8, 8, -3, 3}, 1e-10);
    CHECK_FALSE(s.eigenvalues.empty());
    for (const auto& e : s.eigenvalues) CHECK(e.value.imag() <= 1e-10);
  }
}

TEST_CASE("grouping into blocks") {
  const auto g = group_blocks({0.0, 0.1, 5.0}, {0.0}, 0.5);
  REQUIRE(g.blocks.size() == 2);
  CHECK(g.blocks[0] == std::vector<int>{0, 1});
  CHECK(g.blocks[1] == std::vector<int>{2});

  const auto s = group_blocks({0.0, 0.1, 5.0}, {0.0}, 0.01);
  CHECK(s.blocks.size() == 3);

  const auto off = group_blocks({cplx(3, 3)}, {0.0, kPi / 2}, 0.1);
  REQUIRE(off.blocks.size() == 1);
  CHECK(off.ray[0] == -1);

  const auto chain = group_blocks({0.0, 0.4, 0.8, 1.2}, {0.0}, 0.5);
  CHECK(chain.blocks.size() == 1);
}

TEST_CASE("reference lattices") {
  const auto split = riesz_verdict(make_bvp({-1.0, 1.0}, mat({{1, 2}, {0, 0}}), mat({{0, 0}, {3, 4}})));
  const auto l = reference_spectrum(split, 3);
  REQUIRE(l.size() == 7);
  for (int k = -3; k <= 3; ++k) CHECK(std::abs(l[k + 3] - kPi * k) < 1e-12);

  const auto scalar = reference_spectrum(riesz_verdict(make_bvp({1.0}, I(1), -I(1))), 2);
  REQUIRE(scalar.size() == 5);
  CHECK(std::abs(scalar[4] - 4 * kPi) < 1e-12);

  CHECK_THROWS_AS(reference_spectrum(riesz_verdict(make_bvp({1.0, 1.0}, I(2), mat({{1, 0}, {0, 0}}))), 2),
                  PreconditionError);
}

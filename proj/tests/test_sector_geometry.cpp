#include <doctest.h>

#include "dspec/sector_geometry.hpp"
#include "support.hpp"

using namespace dspec;
using namespace dspec::test;

TEST_CASE("fan of diag(-1, 1)") {
  const SectorFan fan = compute_fan(WeightMatrix{{-1.0, 1.0}});
  REQUIRE(fan.lines.size() == 1);
  CHECK(fan.lines[0] == doctest::Approx(0.0));
  REQUIRE(fan.size() == 2);
  CHECK(fan.sector_of(kI) != fan.sector_of(-kI));
  CHECK(fan.sector_of(1.0) == -1);
}

TEST_CASE("fan of diag(1, i)") {
  const SectorFan fan = compute_fan(WeightMatrix{{1.0, kI}});
  // Re(iλ) = Re(-λ) holds on the line through (1 + i)/2.
  REQUIRE(fan.lines.size() == 3);
  CHECK(fan.lines[0] == doctest::Approx(0.0));
  CHECK(fan.lines[1] == doctest::Approx(kPi / 4));
  CHECK(fan.lines[2] == doctest::Approx(kPi / 2));
  CHECK(fan.size() == 6);
}

TEST_CASE("fan of a scalar weight") {
  const SectorFan fan = compute_fan(WeightMatrix{{1.0}});
  CHECK(fan.lines.size() == 1);
  CHECK(fan.size() == 2);
}

TEST_CASE("admissible and feasible points") {
  const WeightMatrix B{{-1.0, 1.0}};
  CHECK(is_admissible(kI, B));
  CHECK(is_feasible(kI, B));
  CHECK_FALSE(is_admissible(1.0, B));
  const WeightMatrix B2{{1.0, kI}};
  CHECK(is_admissible(std::polar(1.0, kPi / 8), B2));
  CHECK(is_feasible(std::polar(1.0, kPi / 8), B2));
  CHECK_FALSE(is_feasible(std::polar(1.0, kPi / 4), B2));
  CHECK_THROWS_AS(is_admissible(0.0, B), PreconditionError);
}

TEST_CASE("T matrices of two-point pairs") {
  const WeightMatrix B{{-1.0, 1.0}};
  SUBCASE("periodic") {
    const TMatrix T = build_T(kI, I(2), -I(2), B);
    CHECK((T.matrix - mat({{-1, 0}, {0, 1}})).norm() == 0.0);
    CHECK(std::abs(T.matrix.determinant() + 1.0) < 1e-15);
  }
  SUBCASE("dirichlet") {
    const DiracBVP d = dirichlet();
    const TMatrix up = build_T(kI, d.C(), d.D(), B);
    CHECK((up.matrix - mat({{0, 1}, {1, 0}})).norm() == 0.0);
    const TMatrix down = build_T(-kI, d.C(), d.D(), B);
    CHECK((down.matrix - mat({{1, 0}, {0, 1}})).norm() == 0.0);
  }
  CHECK_THROWS_AS(build_T(1.0, I(2), -I(2), B), PreconditionError);
}

TEST_CASE("swapped T replaces exactly one column") {
  const WeightMatrix B{{-1.0, 1.0}};
  const CMatrix C = mat({{1, 2}, {3, 4}}), D = mat({{5, 6}, {7, 8}});
  // At z = i, column 1 comes from D and column 2 from C, so j = 2 and k = 1.
  const TMatrix t = build_T_swapped(kI, C, D, B, {SwapKind::c_to_c, 1, 0});
  CHECK((t.matrix.col(0) - D.col(0)).norm() == 0.0);
  CHECK((t.matrix.col(1) - C.col(0)).norm() == 0.0);
  const TMatrix u = build_T_swapped(kI, C, D, B, {SwapKind::d_to_d, 1, 0});
  CHECK((u.matrix.col(0) - D.col(1)).norm() == 0.0);
  CHECK((u.matrix.col(1) - C.col(1)).norm() == 0.0);
  CHECK_THROWS_AS(build_T_swapped(kI, C, D, B, {SwapKind::c_to_c, 0, 1}), PreconditionError);
}

TEST_CASE("T is constant inside each sector") {
  std::mt19937_64 rng(11);
  const WeightMatrix B{{1.0, kI, -2.0, cplx(0.5, -1.0)}};
  const CMatrix C = random_matrix(rng, 4, 4), D = random_matrix(rng, 4, 4);
  const SectorFan fan = compute_fan(B);
  for (const Sector& s : fan.sectors) {
    const CMatrix ref = build_T(s.representative, C, D, B).matrix;
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) CHECK((build_T(s.point(f), C, D, B).matrix - ref).norm() == 0.0);
  }
}

TEST_CASE("opposite points split the columns of (C D) for real weights") {
  std::mt19937_64 rng(5);
  const WeightMatrix B{{-1.0, 2.0, 3.0}};
  const CMatrix C = random_matrix(rng, 3, 3), D = random_matrix(rng, 3, 3);
  const cplx z(0.3, 0.8);
  const CMatrix a = build_T(z, C, D, B).matrix, b = build_T(-z, C, D, B).matrix;
  CHECK((a + b - C - D).norm() < 1e-14);
}

TEST_CASE("fan is invariant under positive scaling of B") {
  const WeightMatrix B{{1.0, kI, cplx(-1.0, 2.0)}};
  const SectorFan a = compute_fan(B);
  const SectorFan b = compute_fan(WeightMatrix{{3.5, 3.5 * kI, 3.5 * cplx(-1.0, 2.0)}});
  REQUIRE(a.lines.size() == b.lines.size());
  for (std::size_t i = 0; i < a.lines.size(); ++i) CHECK(a.lines[i] == doctest::Approx(b.lines[i]).epsilon(1e-12));
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < a.size(); ++i) CHECK(a.sectors[i].signs == b.sectors[i].signs);
}

TEST_CASE("sector count is bounded by r^2 + r") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> b;
    for (int j = 0; j < 4; ++j) b.push_back(random_complex(rng));
    const SectorFan fan = compute_fan(WeightMatrix{b});
    CHECK(fan.size() <= 4 * 4 + 4);
    for (const Sector& s : fan.sectors) CHECK(is_feasible(s.representative, WeightMatrix{b}));
  }
}

#include <doctest.h>

#include "dspec/asymptotics.hpp"
#include "dspec/timoshenko.hpp"
#include "support.hpp"

using namespace dspec;
using namespace dspec::test;

namespace {

const SectorModel& model_at(const std::vector<SectorModel>& models, const DiracBVP& bvp, cplx z) {
  const int s = compute_fan(bvp.weight).sector_of(z);
  REQUIRE(s >= 0);
  return models[s];
}

// Only q12 is nonzero, so no q12·q21/λ term hides inside ω₀(1 + o(1)).
DiracBVP triangular_fixture() {
  std::vector<CMatrix> s;
  for (int i = 0; i <= 64; ++i) {
    const double x = i / 64.0;
    s.push_back(mat({{0.0, cplx(std::cos(2 * x), 0.5 * x)}, {0.0, 0.0}}));
  }
  return make_bvp({-1.0, 2.0}, mat({{1, 2}, {0, 1}}), mat({{3, 0}, {1, 1}}),
                  PotentialField::grid(s, 1, BoolMatrix::Constant(2, 2, true)));
}

DiracBVP coupled_fixture() {
  CMatrix q = mat({{0.0, cplx(0.6, 0.2)}, {cplx(-0.4, 0.3), 0.0}});
  return make_bvp({-1.0, 1.0}, mat({{1, 2}, {0, 0}}), mat({{0, 0}, {3, 1}}), PotentialField::constant(q));
}

}  // namespace

TEST_CASE("gamma and tau of the free two-point weight") {
  const DiracBVP bvp = periodic({-1.0, 1.0});
  const auto models = sector_models(bvp);
  const SectorModel& up = model_at(models, bvp, kI);
  CHECK(std::abs(up.gamma - 1.0) < 1e-15);
  CHECK(std::abs(up.tau + 1.0) < 1e-15);
  const SectorModel& down = model_at(models, bvp, -kI);
  CHECK(std::abs(down.tau - 1.0) < 1e-15);
}

TEST_CASE("gamma ignores diagonal entries of passive coordinates") {
  CMatrix q = CMatrix::Zero(2, 2);
  q(0, 0) = 1.0;
  const DiracBVP bvp = make_bvp({-1.0, 1.0}, I(2), -I(2), PotentialField::constant(q));
  const auto models = sector_models(bvp);
  const SectorModel& down = model_at(models, bvp, -kI);
  CHECK(std::abs(down.gamma - 1.0) < 1e-15);
  CHECK(std::abs(down.tau - 1.0) < 1e-15);
}

TEST_CASE("gamma follows the diagonal potential") {
  const DiracBVP bvp = make_bvp({-1.0, 2.0}, I(2), -I(2), PotentialField::constant(mat({{0.2, 0.5}, {cplx(0, 0.3), -0.1}})));
  for (const auto& m : sector_models(bvp)) {
    const cplx dir = m.geometry.representative / std::abs(m.geometry.representative);
    CHECK(std::abs(scaled_determinant(bvp, 80.0 * dir, m) / m.omega0 - 1.0) < 0.05);
  }
}

TEST_CASE("omega0 values") {
  const DiracBVP per = periodic({-1.0, 1.0});
  CHECK(std::abs(omega0(kI, per.C(), per.D(), per.weight) + 1.0) < 1e-15);
  const DiracBVP lev = levin(kPi / 2);
  CHECK(std::abs(omega0(kI, lev.C(), lev.D(), lev.weight)) == 0.0);
  const DiracBVP beam = reduce_to_dirac(constant_beam(1.0, 1.0, 4.0, 1.0, 1.0, 2.5, 13.0 / 12)).dirac;
  CHECK(std::abs(omega0(-kI, beam.C(), beam.D(), beam.weight) - 75.0 / 8) < 1e-12);
}

TEST_CASE("omega1 of the sine example") {
  const DiracBVP lev = levin(kPi / 2);
  CHECK(std::abs(omega1(kI, lev) - 0.5 * kI) < 1e-15);
  CHECK(std::abs(omega1(-kI, lev) + 0.5 * kI) < 1e-15);
  CHECK(std::abs(omega1(kI, periodic({-1.0, 1.0}))) == 0.0);
}

TEST_CASE("omega1 requires continuity flags") {
  const DiracBVP lev = levin(kPi / 2);
  DiracBVP unflagged = lev;
  unflagged.potential = lev.potential.with_continuity(BoolMatrix::Constant(2, 2, false));
  CHECK_FALSE(omega1_defined(kI, unflagged));
  CHECK_THROWS_AS(omega1(kI, unflagged), PreconditionError);
  const auto models = sector_models(unflagged);
  CHECK_FALSE(models[0].omega1.has_value());
}

TEST_CASE("order-0 model of the Dirichlet pair") {
  const DiracBVP bvp = dirichlet();
  const auto models = sector_models(bvp);
  const SectorModel& up = model_at(models, bvp, kI);
  CHECK(std::abs(up.omega0 + 1.0) < 1e-15);
  const cplx l = 20.0 * kI;
  const cplx exact = 2.0 * kI * std::sin(l);
  CHECK(std::abs(delta_model(l, up, 0) / exact - 1.0) < 1e-15);
  CHECK(std::abs(scaled_determinant(bvp, 10.0 * kI, up) + 1.0) < 1e-8);
  CHECK_THROWS_AS(scaled_determinant(bvp, 10.0, up), PreconditionError);
  CHECK_THROWS_AS(delta_model(-kI, up, 0), PreconditionError);
}

TEST_CASE("order-0 model of the periodic pair off the axis") {
  const DiracBVP bvp = periodic({-1.0, 1.0});
  const auto models = sector_models(bvp);
  const SectorModel& up = model_at(models, bvp, kI);
  const cplx l(3.0, 10.0);
  CHECK(std::abs(char_determinant(bvp, l) / delta_model(l, up, 0) - 1.0) < 10 * std::exp(-10.0));
}

TEST_CASE("order-1 model along the imaginary axis of the sine example") {
  const DiracBVP bvp = levin(kPi / 2);
  const auto models = sector_models(bvp);
  const SectorModel& up = model_at(models, bvp, kI);
  for (double t : {10.0, 20.0, 40.0, 80.0}) {
    const double err = std::abs(char_determinant(bvp, t * kI) / delta_model(t * kI, up, 1) - 1.0);
    CHECK(err < 0.2);
  }
  CHECK_THROWS_AS(delta_model(0.5 * kI, up, 1), PreconditionError);
}

TEST_CASE("omega values are constant inside sectors") {
  std::mt19937_64 rng(29);
  const DiracBVP bvp = make_bvp({-1.0, 2.0, kI}, random_matrix(rng, 3, 3), random_matrix(rng, 3, 3),
                                PotentialField::constant(random_matrix(rng, 3, 3)));
  for (const Sector& s : compute_fan(bvp.weight).sectors) {
    const cplx w0 = omega0(s.representative, bvp.C(), bvp.D(), bvp.weight);
    const cplx w1 = omega1(s.representative, bvp);
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      CHECK(std::abs(omega0(s.point(f), bvp.C(), bvp.D(), bvp.weight) - w0) <= 1e-12 * std::abs(w0));
      CHECK(std::abs(omega1(s.point(f), bvp) - w1) <= 1e-12 * (1.0 + std::abs(w1)));
    }
  }
}

TEST_CASE("order-0 error decreases along bisectors") {
  const DiracBVP bvp = coupled_fixture();
  for (const SectorModel& m : sector_models(bvp)) {
    REQUIRE(std::abs(m.omega0) > 0.0);
    const double phi = 0.5 * (m.geometry.phi_start + m.geometry.phi_end);
    double prev = 1e9;
    for (double t : {10.0, 20.0, 40.0, 80.0}) {
      const cplx l = std::polar(t, phi);
      const double err = std::abs(char_determinant(bvp, l) / delta_model(l, m, 0) - 1.0);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 0.05);
  }
}

TEST_CASE("order-1 error decays faster than 1/|λ|") {
  const DiracBVP bvp = triangular_fixture();
  for (const SectorModel& m : sector_models(bvp)) {
    const double phi = 0.5 * (m.geometry.phi_start + m.geometry.phi_end);
    std::vector<double> lt, le;
    for (double t : {10.0, 20.0, 40.0, 80.0}) {
      const cplx l = std::polar(t, phi);
      lt.push_back(std::log(t));
      le.push_back(std::log(std::abs(char_determinant(bvp, l) / delta_model(l, m, 1) - 1.0)));
    }
    const double slope = (le.back() - le.front()) / (lt.back() - lt.front());
    CHECK(slope <= -1.5);
  }
}

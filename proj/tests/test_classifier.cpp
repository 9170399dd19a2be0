#include <doctest.h>

#include "dspec/classifier.hpp"
#include "dspec/linalg.hpp"
#include "support.hpp"

using namespace dspec;
using namespace dspec::test;

namespace {

// C = M, D = M·diag(e^{iφ_j}), so CBC* = DBD* = MBM*.
DiracBVP random_normal(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
  std::uniform_real_distribution<double> w(0.3, 3.0);
  const int n = 2 + pick(rng) % 3;
  std::vector<cplx> b(n);
  for (int j = 0; j < n; ++j) b[j] = (j % 2 == 0 ? -1.0 : 1.0) * w(rng);
  CMatrix D = CMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) D(j, j) = std::polar(1.0, phase(rng));
  const CMatrix M = random_matrix(rng, n, n) + 3.0 * I(n);
  return make_bvp(b, M, M * D);
}

DiracBVP random_accumulative(std::mt19937_64& rng) {
  // C = I, D = diag(d) with |d_j| > 1 where b_j < 0 and |d_j| < 1 where b_j > 0.
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
  const int n = 2;
  std::vector<cplx> b = {-1.0 - u(rng), 0.5 + u(rng)};
  CMatrix D = CMatrix::Zero(n, n);
  D(0, 0) = std::polar(1.0 / u(rng), phase(rng));
  D(1, 1) = std::polar(u(rng), phase(rng));
  return make_bvp(b, I(n), D);
}

}  // namespace

TEST_CASE("regularity of closed-form fixtures") {
  const auto dir = classify_regularity(dirichlet());
  CHECK(dir.regular);
  CHECK(dir.weakly_regular);
  for (cplx d : dir.sector_dets) CHECK(std::abs(std::abs(d) - 1.0) < 1e-14);

  for (auto b : std::vector<std::vector<cplx>>{{-1.0, 1.0}, {1.0, 2.0, -3.0}, {kI, -2.0}}) {
    const auto r = classify_regularity(periodic(b));
    CHECK(r.regular);
    CHECK(r.weakly_regular);
  }
}

TEST_CASE("two-point example is degenerate and not weakly regular") {
  for (double theta : {kPi / 2, kPi / 3}) {
    const auto r = classify_regularity(levin(theta));
    CHECK_FALSE(r.regular);
    CHECK_FALSE(r.weakly_regular);
    CHECK(r.degenerate_unperturbed);
    CHECK_FALSE(r.degenerate);
    CHECK_FALSE(r.witness_triple.has_value());
  }
}

TEST_CASE("weak regularity witness strictly contains the origin") {
  const auto r = classify_regularity(periodic({-1.0, 1.0, kI}));
  REQUIRE(r.witness_triple);
  const auto& t = *r.witness_triple;
  CHECK(triangle_contains_origin(t[0], t[1], t[2]));
  CHECK_FALSE(triangle_contains_origin(1.0, kI, cplx(1, 1)));
  CHECK_FALSE(triangle_contains_origin(1.0, -1.0, kI));
}

TEST_CASE("completeness of the two-point example via endpoint values") {
  const auto c = completeness_certificate(levin(kPi / 2));
  CHECK(c.status == CompletenessStatus::certified_complete);
  CHECK(c.rule == CompletenessRule::two_by_two_minors);

  const auto p = completeness_certificate(periodic({-1.0, 1.0}));
  CHECK(p.status == CompletenessStatus::certified_complete);
  CHECK(p.rule == CompletenessRule::weak_regularity);
  CHECK(p.points.size() == 3);
  for (const auto& w : p.points) CHECK(std::abs(w.omega0) > 0.5);
}

TEST_CASE("unperturbed two-point example is certified incomplete") {
  const auto c = completeness_certificate(levin(kPi / 2, false));
  CHECK(c.status == CompletenessStatus::certified_incomplete);
  REQUIRE(c.incompleteness);
  CHECK(c.incompleteness->rule == CompletenessRule::decoupled_dirichlet);
  CHECK(c.incompleteness->component == 0);
}

TEST_CASE("reflection witness") {
  const CMatrix swap = mat({{0, 1}, {1, 0}});
  const auto w = reflection_witness(make_bvp({-1.0, 1.0}, I(2), -swap));
  REQUIRE(w);
  CHECK((w->A - swap).norm() < 1e-14);
  CHECK_FALSE(reflection_witness(make_bvp({1.0, 1.0}, I(2), -swap)));

  const auto c = completeness_certificate(make_bvp({-1.0, 1.0}, I(2), -swap));
  CHECK(c.status == CompletenessStatus::certified_incomplete);
  CHECK(c.rule == CompletenessRule::reflection_symmetry);
}

TEST_CASE("reflection witness for a symmetric block potential") {
  // B = diag(b, -b) blocks, A swaps the blocks, Q(1-x) = A⁻¹Q(x)A.
  const CMatrix A = mat({{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}});
  std::vector<CMatrix> s;
  for (int i = 0; i <= 32; ++i) {
    const double x = i / 32.0;
    CMatrix q = CMatrix::Zero(4, 4);
    q(0, 1) = std::cos(kPi * x);
    q(2, 3) = std::cos(kPi * (1 - x));
    s.push_back(q);
  }
  const auto bvp = make_bvp({1.0, 2.0, -1.0, -2.0}, I(4), -A, PotentialField::grid(s, 1));
  const auto w = reflection_witness(bvp);
  REQUIRE(w);
  CHECK(w->epsilon >= 3.0 / 32.0);

  s[0](0, 1) = 5.0;
  CHECK_FALSE(reflection_witness(make_bvp({1.0, 2.0, -1.0, -2.0}, I(4), -A, PotentialField::grid(s, 1))));
}

TEST_CASE("normality examples") {
  for (auto b : std::vector<std::vector<cplx>>{{-1.0, 1.0}, {2.0, kI, -3.0}}) {
    const int n = static_cast<int>(b.size());
    CHECK(normality_check(WeightMatrix{b}, I(n), -I(n)));
    CHECK_FALSE(normality_check(WeightMatrix{b}, I(n), CMatrix::Zero(n, n)));
  }
  const auto d = dirichlet();
  CHECK(normality_check(d.weight, d.C(), d.D()));
}

TEST_CASE("dissipativity examples") {
  CHECK(dissipativity_check(make_bvp({-1.0, 1.0}, mat({{1, 0}, {0, 0}}), mat({{0, 0}, {0, 1}}))) ==
        Dissipativity::dissipative);
  CMatrix q = mat({{1.0, cplx(0.5, 0.5)}, {cplx(0.5, -0.5), -2.0}});
  CHECK(dissipativity_check(make_bvp({-1.0, 1.0}, I(2), -I(2), PotentialField::constant(q))) ==
        Dissipativity::selfadjoint);
  CHECK(dissipativity_check(periodic({1.0, kI})) == Dissipativity::not_dirac_type);
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 0) = cplx(0, 1);
  bad(1, 1) = cplx(0, -1);
  CHECK(dissipativity_check(make_bvp({-1.0, 1.0}, I(2), -I(2), PotentialField::constant(bad))) ==
        Dissipativity::neither);
}

TEST_CASE("riesz verdicts") {
  const auto split = riesz_verdict(make_bvp({-1.0, 1.0}, mat({{1, 2}, {0, 0}}), mat({{0, 0}, {3, 4}})));
  CHECK(split.kind == RieszKind::basis_with_parentheses);
  REQUIRE(split.angles.size() == 2);
  std::vector<double> a = split.angles;
  std::sort(a.begin(), a.end());
  CHECK(std::abs(a[0]) < 1e-12);
  CHECK(std::abs(a[1] - kPi) < 1e-12);

  const auto none = riesz_verdict(make_bvp({1.0, 1.0}, I(2), mat({{1, 0}, {0, 0}})));
  CHECK(none.kind == RieszKind::no_basis);
  CHECK(none.rule == RieszRule::scalar_weight);
  CHECK(riesz_verdict(make_bvp({1.0, 1.0}, I(2), -I(2))).kind == RieszKind::basis_with_parentheses);

  for (auto b : std::vector<std::vector<cplx>>{{-1.0, 1.0}, {-1.0, 2.0}, {1.0, 2.0, -3.0}}) {
    const int n = static_cast<int>(b.size());
    CHECK(riesz_verdict(make_bvp(b, I(n), -I(n))).kind == RieszKind::basis_with_parentheses);
    CHECK(riesz_verdict(make_bvp(b, I(n), I(n))).kind == RieszKind::basis_with_parentheses);
  }
}

TEST_CASE("synthesis verdicts") {
  const auto acc = make_bvp({-1.0, 1.0}, mat({{1, 2}, {0, 0}}), mat({{0, 0}, {1, 1}}));
  REQUIRE(dissipativity_check(acc) != Dissipativity::neither);
  const auto cert = completeness_certificate(acc);
  CHECK(cert.status == CompletenessStatus::certified_complete);
  const auto v = synthesis_verdict(acc, cert);
  CHECK(v.applicable);
  CHECK(v.admits_synthesis);
  CHECK(v.ladder.size() == 4);

  const auto sa = periodic({-1.0, 1.0});
  const auto vs = synthesis_verdict(sa, completeness_certificate(sa));
  CHECK(vs.dissipativity == Dissipativity::selfadjoint);
  CHECK(vs.admits_synthesis);

  const auto nd = periodic({1.0, kI});
  CHECK_FALSE(synthesis_verdict(nd, completeness_certificate(nd)).applicable);
}

TEST_CASE("normal boundary conditions are regular") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto bvp = random_normal(rng);
    REQUIRE(normality_check(bvp.weight, bvp.C(), bvp.D()));
    CHECK(classify_regularity(bvp).regular);
  }
}

TEST_CASE("accumulative boundary conditions have nonzero det T at -B") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    const auto bvp = random_accumulative(rng);
    REQUIRE(dissipativity_check(bvp) == Dissipativity::accumulative);
    const CMatrix t = build_T(kI, bvp.C(), bvp.D(), bvp.weight).matrix;
    CHECK(std::abs(linalg::det(t)) > kDetTol * linalg::column_norm_product(t));
  }
}

TEST_CASE("completeness is invariant under equivalent boundary conditions") {
  std::mt19937_64 rng(13);
  const std::vector<DiracBVP> cases = {levin(kPi / 2), levin(kPi / 3, false), periodic({-1.0, 2.0}), dirichlet(),
                                       make_bvp({-1.0, 1.0}, I(2), -mat({{0, 1}, {1, 0}}))};
  for (const auto& bvp : cases) {
    const auto ref = completeness_certificate(bvp).status;
    for (int i = 0; i < 20; ++i) {
      const CMatrix M = random_matrix(rng, 2, 2) + 2.0 * I(2);
      DiracBVP eq = bvp;
      eq.boundary.C = M * bvp.C();
      eq.boundary.D = M * bvp.D();
      CHECK(completeness_certificate(eq).status == ref);
    }
  }
}

TEST_CASE("minor rule agrees with the generic omega search") {
  std::mt19937_64 rng(14);
  int both = 0;
  for (int i = 0; i < 40; ++i) {
    CMatrix q = CMatrix::Zero(2, 2);
    q(0, 1) = random_complex(rng);
    q(1, 0) = random_complex(rng);
    const auto bvp = make_bvp({-1.0, 1.0}, random_matrix(rng, 2, 2), random_matrix(rng, 2, 2),
                              PotentialField::constant(q, BoolMatrix::Constant(2, 2, true)));
    const auto minors = two_by_two_rule(bvp);
    const auto omega = omega_search(bvp);
    if (!minors || !omega) continue;
    ++both;
    CHECK(minors->status == omega->status);
  }
  CHECK(both > 0);
}

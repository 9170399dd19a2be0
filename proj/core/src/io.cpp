#include "dspec/io.hpp"

#include <fstream>
#include <sstream>

namespace dspec {

namespace {

std::string at(const std::string& where, const std::string& key) { return where + "." + key; }
std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError("field '" + where + "': " + what);
}

const json& member(const json& j, const std::string& where, const std::string& key) {
  if (!j.is_object()) fail(where, "expected an object");
  if (!j.contains(key)) fail(at(where, key), "missing");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

RVector real_profile(const json& j, const std::string& where) {
  if (j.is_number()) return RVector::Constant(1, j.get<double>());
  if (!j.is_array() || j.empty()) fail(where, "expected a number or a nonempty array of numbers");
  RVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = number(j[i], at(where, i));
  return v;
}

CVector complex_profile(const json& j, const std::string& where) {
  if (!j.is_array()) return CVector::Constant(1, complex_from_json(j, where));
  if (j.empty()) fail(where, "expected a nonempty array");
  CVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = complex_from_json(j[i], at(where, i));
  return v;
}

BoolMatrix bool_matrix(const json& j, const std::string& where, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) fail(where, "expected " + std::to_string(n) + " rows");
  BoolMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = j[r];
    const std::string rw = at(where, r);
    if (!row.is_array() || static_cast<int>(row.size()) != n) fail(rw, "expected " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) {
      if (!row[c].is_boolean()) fail(at(rw, c), "expected a boolean");
      m(r, c) = row[c].get<bool>();
    }
  }
  return m;
}

json angles_json(const std::vector<double>& a) { return json(a); }

json complex_list(const std::vector<cplx>& zs) {
  json out = json::array();
  for (cplx z : zs) out.push_back(complex_to_json(z));
  return out;
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min(e.byte, text.size() + 1);
    for (std::size_t i = 0; i + 1 < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

json complex_to_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

cplx complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_object()) fail(where, "expected {\"re\", \"im\"}");
  const double re = j.contains("re") ? number(j["re"], at(where, "re")) : 0.0;
  const double im = j.contains("im") ? number(j["im"], at(where, "im")) : 0.0;
  if (!j.contains("re") && !j.contains("im")) fail(where, "expected {\"re\", \"im\"}");
  return {re, im};
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j, const std::string& where, int rows, int cols) {
  if (!j.is_array() || j.empty()) fail(where, "expected an array of rows");
  if (rows >= 0 && static_cast<int>(j.size()) != rows) fail(where, "expected " + std::to_string(rows) + " rows");
  const std::size_t nc = j[0].is_array() ? j[0].size() : 0;
  if (cols >= 0 && static_cast<int>(nc) != cols) fail(at(where, 0), "expected " + std::to_string(cols) + " entries");
  CMatrix m(j.size(), nc);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rw = at(where, r);
    if (!j[r].is_array() || j[r].size() != nc) fail(rw, "expected " + std::to_string(nc) + " entries");
    for (std::size_t c = 0; c < nc; ++c) m(r, c) = complex_from_json(j[r][c], at(rw, c));
  }
  return m;
}

json bvp_to_json(const DiracBVP& bvp) {
  const int n = bvp.n();
  json B = json::array();
  for (cplx b : bvp.weight.b) B.push_back(complex_to_json(b));
  const PotentialField& q = bvp.potential;
  json Q;
  switch (q.kind()) {
    case PotentialKind::zero:
      Q["kind"] = "zero";
      break;
    case PotentialKind::constant:
      Q["kind"] = "constant";
      Q["matrix"] = matrix_to_json(q.samples().front());
      break;
    case PotentialKind::grid: {
      Q["kind"] = "grid";
      Q["interp"] = q.interp();
      json samples = json::array();
      for (const CMatrix& s : q.samples()) samples.push_back(matrix_to_json(s));
      Q["samples"] = std::move(samples);
      break;
    }
  }
  if (q.continuity().size() > 0) {
    json flags = json::array();
    for (int r = 0; r < n; ++r) {
      json row = json::array();
      for (int c = 0; c < n; ++c) row.push_back(static_cast<bool>(q.continuity()(r, c)));
      flags.push_back(std::move(row));
    }
    Q["endpoint_continuity"] = std::move(flags);
  }
  return {{"n", n}, {"B", B}, {"C", matrix_to_json(bvp.C())}, {"D", matrix_to_json(bvp.D())}, {"Q", Q}};
}

DiracBVP bvp_from_json(const json& j) {
  const std::string root = "$";
  const json& jB = member(j, root, "B");
  if (!jB.is_array() || jB.empty()) fail("$.B", "expected a nonempty array");
  std::vector<cplx> b;
  for (std::size_t i = 0; i < jB.size(); ++i) b.push_back(complex_from_json(jB[i], at("$.B", i)));
  const int n = static_cast<int>(b.size());
  if (j.contains("n")) {
    if (!j["n"].is_number_integer()) fail("$.n", "expected an integer");
    if (j["n"].get<int>() != n) fail("$.n", "does not match the length of B (" + std::to_string(n) + ")");
  }
  CMatrix C = matrix_from_json(member(j, root, "C"), "$.C", n, n);
  CMatrix D = matrix_from_json(member(j, root, "D"), "$.D", n, n);

  std::optional<PotentialField> q;
  if (j.contains("Q")) {
    const json& jq = j["Q"];
    const std::string kind = jq.is_object() && jq.contains("kind") && jq["kind"].is_string()
                                 ? jq["kind"].get<std::string>()
                                 : std::string();
    std::optional<BoolMatrix> flags;
    if (jq.is_object() && jq.contains("endpoint_continuity"))
      flags = bool_matrix(jq["endpoint_continuity"], "$.Q.endpoint_continuity", n);
    if (kind == "zero") {
      q = PotentialField::zero(n);
      if (flags) q = q->with_continuity(*flags);
    } else if (kind == "constant") {
      q = PotentialField::constant(matrix_from_json(member(jq, "$.Q", "matrix"), "$.Q.matrix", n, n), flags);
    } else if (kind == "grid") {
      const json& js = member(jq, "$.Q", "samples");
      if (!js.is_array() || js.size() < 2) fail("$.Q.samples", "expected at least two samples");
      std::vector<CMatrix> samples;
      for (std::size_t i = 0; i < js.size(); ++i) samples.push_back(matrix_from_json(js[i], at("$.Q.samples", i), n, n));
      int interp = 1;
      if (jq.contains("interp")) {
        if (!jq["interp"].is_number_integer()) fail("$.Q.interp", "expected 0 or 1");
        interp = jq["interp"].get<int>();
        if (interp != 0 && interp != 1) fail("$.Q.interp", "expected 0 or 1");
      }
      q = PotentialField::grid(std::move(samples), interp, flags);
    } else {
      fail("$.Q.kind", "expected \"zero\", \"constant\" or \"grid\"");
    }
  }
  DiracBVP bvp = make_bvp(std::move(b), std::move(C), std::move(D), std::move(q));
  require_valid(bvp);
  return bvp;
}

DiracBVP load_bvp(const std::string& path) { return bvp_from_json(load_json_file(path)); }

json beam_to_json(const BeamModel& beam) {
  auto reals = [](const RVector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); };
  auto cplxs = [](const CVector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
    return a;
  };
  return {{"length", beam.length},
          {"rho", reals(beam.rho)},
          {"I_rho", reals(beam.I_rho)},
          {"K", reals(beam.K)},
          {"EI", reals(beam.EI)},
          {"p1", cplxs(beam.p1)},
          {"p2", cplxs(beam.p2)},
          {"alpha1", complex_to_json(beam.alpha1)},
          {"alpha2", complex_to_json(beam.alpha2)},
          {"beta1", complex_to_json(beam.beta1)},
          {"beta2", complex_to_json(beam.beta2)}};
}

BeamModel beam_from_json(const json& j) {
  const std::string root = "$";
  BeamModel b;
  b.length = j.contains("length") ? number(j["length"], "$.length") : 1.0;
  b.rho = real_profile(member(j, root, "rho"), "$.rho");
  b.I_rho = real_profile(member(j, root, "I_rho"), "$.I_rho");
  b.K = real_profile(member(j, root, "K"), "$.K");
  b.EI = real_profile(member(j, root, "EI"), "$.EI");
  b.p1 = j.contains("p1") ? complex_profile(j["p1"], "$.p1") : CVector::Zero(1);
  b.p2 = j.contains("p2") ? complex_profile(j["p2"], "$.p2") : CVector::Zero(1);
  b.alpha1 = complex_from_json(member(j, root, "alpha1"), "$.alpha1");
  b.alpha2 = complex_from_json(member(j, root, "alpha2"), "$.alpha2");
  b.beta1 = j.contains("beta1") ? complex_from_json(j["beta1"], "$.beta1") : cplx(0.0);
  b.beta2 = j.contains("beta2") ? complex_from_json(j["beta2"], "$.beta2") : cplx(0.0);
  return b;
}

BeamModel load_beam(const std::string& path) { return beam_from_json(load_json_file(path)); }

json to_json(const SectorFan& fan, const DiracBVP& bvp) {
  json sectors = json::array();
  for (const Sector& s : fan.sectors) {
    const TMatrix T = build_T(s.representative, bvp.C(), bvp.D(), bvp.weight);
    sectors.push_back({{"phi_start", s.phi_start},
                       {"phi_end", s.phi_end},
                       {"representative", complex_to_json(s.representative)},
                       {"signs", s.signs},
                       {"det_T", complex_to_json(T.matrix.determinant())}});
  }
  return {{"lines", angles_json(fan.lines)}, {"sectors", sectors}};
}

json to_json(const RegularityReport& r) {
  json out = {{"regular", r.regular},
              {"weakly_regular", r.weakly_regular},
              {"degenerate", r.degenerate},
              {"degenerate_unperturbed", r.degenerate_unperturbed},
              {"sector_det_T", complex_list(r.sector_dets)},
              {"sector_nonzero", r.sector_nonzero}};
  if (r.witness_triple) out["witness_triple"] = complex_list({r.witness_triple->begin(), r.witness_triple->end()});
  return out;
}

json to_json(const CompletenessCertificate& c) {
  json out = {{"status", to_string(c.status)}, {"rule", to_string(c.rule)}};
  json pts = json::array();
  for (const OmegaWitness& w : c.points) {
    json p = {{"z", complex_to_json(w.z)}, {"omega0", complex_to_json(w.omega0)}};
    if (w.omega1) p["omega1"] = complex_to_json(*w.omega1);
    pts.push_back(std::move(p));
  }
  out["points"] = std::move(pts);
  json vals = json::object();
  for (const NamedValue& v : c.values) vals[v.name] = complex_to_json(v.value);
  out["values"] = std::move(vals);
  if (c.incompleteness) {
    const IncompletenessWitness& w = *c.incompleteness;
    json wj = {{"rule", to_string(w.rule)}, {"epsilon", w.epsilon}};
    if (w.component >= 0) wj["component"] = w.component;
    if (w.A.size() > 0) wj["A"] = matrix_to_json(w.A);
    out["incompleteness"] = std::move(wj);
  }
  if (c.vanishing_half_plane) out["vanishing_half_plane"] = *c.vanishing_half_plane;
  return out;
}

json to_json(const RieszVerdict& v) {
  json pairs = json::array();
  for (const auto& [a, b] : v.pairs) pairs.push_back({a, b});
  return {{"kind", to_string(v.kind)},
          {"rule", to_string(v.rule)},
          {"angles", angles_json(v.angles)},
          {"lattice_steps", complex_list(v.lattice_steps)},
          {"pairs", pairs}};
}

json to_json(const SynthesisVerdict& v) {
  return {{"applicable", v.applicable},
          {"admits_synthesis", v.admits_synthesis},
          {"dissipativity", to_string(v.dissipativity)},
          {"ladder", v.ladder},
          {"log_abs_delta", v.log_abs_delta},
          {"tau", v.tau},
          {"growth_rate", v.growth_rate},
          {"power", v.power}};
}

json to_json(const SectorModel& m) {
  json out = {{"sector", m.sector},
              {"phi_start", m.geometry.phi_start},
              {"phi_end", m.geometry.phi_end},
              {"gamma", complex_to_json(m.gamma)},
              {"tau", complex_to_json(m.tau)},
              {"omega0", complex_to_json(m.omega0)}};
  out["omega1"] = m.omega1 ? complex_to_json(*m.omega1) : json(nullptr);
  return out;
}

json to_json(const SpectrumSlice& s) {
  json eigs = json::array();
  for (const Eigenvalue& e : s.eigenvalues)
    eigs.push_back({{"value", complex_to_json(e.value)}, {"multiplicity", e.multiplicity}});
  json unresolved = json::array();
  for (const UnresolvedCell& u : s.unresolved)
    unresolved.push_back({{"cell", {u.cell.x0, u.cell.x1, u.cell.y0, u.cell.y1}}, {"count", u.count}});
  return {{"region", {s.region.x0, s.region.x1, s.region.y0, s.region.y1}},
          {"total_count", s.total_count},
          {"residual", s.residual},
          {"eigenvalues", eigs},
          {"unresolved", unresolved}};
}

json to_json(const RieszBlocks& b) {
  return {{"angles", angles_json(b.angles)}, {"epsilon", b.epsilon}, {"blocks", b.blocks}, {"ray", b.ray}};
}

json to_json(const BeamConditions& c) {
  json checks = json::array();
  for (const Inequality& q : c.checks)
    checks.push_back({{"name", q.name}, {"value", complex_to_json(q.value)}, {"holds", q.holds}});
  return {{"det_TB", complex_to_json(c.det_TB)},
          {"det_TmB", complex_to_json(c.det_TmB)},
          {"complete_minimal", c.weak_complete},
          {"riesz_with_parentheses", c.riesz},
          {"beta_zero_criterion", {{"applicable", c.nonweak_applicable},
                                   {"complete", c.nonweak_complete},
                                   {"case_1", std::string(1, c.case_j[0])},
                                   {"case_2", std::string(1, c.case_j[1])}}},
          {"checks", checks}};
}

json classification_report(const DiracBVP& bvp, const StepControl& ctrl) {
  const RegularityReport reg = classify_regularity(bvp, ctrl);
  const CompletenessCertificate cert = completeness_certificate(bvp);
  json out;
  out["regularity"] = to_json(reg);
  out["regular"] = reg.regular;
  out["completeness"] = to_json(cert);
  out["complete"] = to_string(cert.status);
  out["normal"] = normality_check(bvp.weight, bvp.C(), bvp.D());
  out["dissipativity"] = to_string(dissipativity_check(bvp));
  out["riesz"] = to_json(riesz_verdict(bvp));
  out["synthesis"] = to_json(synthesis_verdict(bvp, cert, ctrl));
  return out;
}

}  // namespace dspec

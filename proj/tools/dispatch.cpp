#include "dispatch.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "dspec/io.hpp"
#include "dspec/resolvent.hpp"
#include "dspec/root_functions.hpp"

namespace dspec::cli {

namespace {

struct Options {
  std::string input, input2, out, format;
  double tol = 1e-10;
  long steps = 0;
  int grid = 0;
  std::string region, angles, lambda, at, ray;
  double group_eps = 0.0;
  std::uint64_t seed = 0;
  int multiplicity = 1;
  int samples = 64;
  double rmax = 80.0;
  bool scaled = false;
  std::string scan;
  std::string emit_dirac, beam_spectrum;
  bool conditions = false;
};

std::vector<double> split_numbers(const std::string& s, const std::string& flag) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(flag + ": '" + item + "' is not a number");
    }
  }
  return v;
}

Rect parse_region(const std::string& s) {
  const auto v = split_numbers(s, "--region");
  if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3]))
    throw ValidationError("--region expects x0,x1,y0,y1 with x0<x1 and y0<y1");
  return {v[0], v[1], v[2], v[3]};
}

cplx parse_lambda(const std::string& s) {
  if (s.empty()) throw ValidationError("--lambda is required");
  const auto v = split_numbers(s, "--lambda");
  if (v.empty() || v.size() > 2) throw ValidationError("--lambda expects re or re,im");
  return {v[0], v.size() > 1 ? v[1] : 0.0};
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
public:
  Csv(std::ostream& os, std::initializer_list<std::string> header) : os_(os) {
    row(std::vector<std::string>(header));
  }
  explicit Csv(std::ostream& os, const std::vector<std::string>& header) : os_(os) { row(header); }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }

private:
  std::ostream& os_;
};

StepControl step_control(const Options& o) {
  StepControl c;
  if (o.steps > 0) c.base_steps = static_cast<int>(o.steps);
  return c;
}

void emit_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

int run_fan(const Options& o, std::ostream& os) {
  const DiracBVP bvp = load_bvp(o.input);
  emit_json(os, to_json(compute_fan(bvp.weight), bvp));
  return kOk;
}

int run_classify(const Options& o, std::ostream& os) {
  emit_json(os, classification_report(load_bvp(o.input), step_control(o)));
  return kOk;
}

json blocks_json(const SpectrumSlice& s, const DiracBVP& bvp, const Options& o) {
  std::vector<double> angles;
  if (!o.angles.empty()) {
    angles = split_numbers(o.angles, "--angles");
  } else {
    angles = riesz_verdict(bvp).angles;
  }
  std::vector<cplx> eigs;
  for (const Eigenvalue& e : s.eigenvalues)
    for (int k = 0; k < e.multiplicity; ++k) eigs.push_back(e.value);
  return to_json(group_blocks(eigs, angles, o.group_eps));
}

int run_spectrum(const Options& o, std::ostream& os) {
  const DiracBVP bvp = load_bvp(o.input);
  if (o.region.empty()) throw ValidationError("--region is required");
  const SpectrumSlice s = locate_eigenvalues(bvp, parse_region(o.region), o.tol, step_control(o));
  if (o.format == "json") {
    json j = to_json(s);
    if (o.group_eps > 0) j["blocks"] = blocks_json(s, bvp, o);
    emit_json(os, j);
  } else {
    Csv csv(os, {"re", "im", "multiplicity"});
    for (const Eigenvalue& e : s.eigenvalues)
      csv.row({num(e.value.real()), num(e.value.imag()), std::to_string(e.multiplicity)});
  }
  return s.unresolved.empty() ? kOk : kNumerical;
}

int run_detscan(const Options& o, std::ostream& os) {
  const DiracBVP bvp = load_bvp(o.input);
  const StepControl ctrl = step_control(o);
  const int m = std::max(o.samples, 2);
  std::vector<cplx> points;
  if (!o.ray.empty()) {
    const auto v = split_numbers(o.ray, "--ray");
    if (v.size() != 1) throw ValidationError("--ray expects one angle");
    const cplx dir = std::polar(1.0, v[0]);
    for (int k = 1; k <= m; ++k) points.push_back(dir * (o.rmax * k / m));
  } else {
    if (o.region.empty()) throw ValidationError("detscan needs --region or --ray");
    const Rect r = parse_region(o.region);
    for (int iy = 0; iy < m; ++iy)
      for (int ix = 0; ix < m; ++ix)
        points.push_back({r.x0 + r.width() * ix / (m - 1), r.y0 + r.height() * iy / (m - 1)});
  }
  std::vector<SectorModel> models;
  SectorFan fan;
  if (o.scaled) {
    models = sector_models(bvp);
    fan = compute_fan(bvp.weight);
  }
  Csv csv(os, {"re_lambda", "im_lambda", "re_delta", "im_delta", "abs_delta"});
  for (cplx z : points) {
    cplx d;
    if (o.scaled) {
      const int s = fan.sector_of(z);
      if (s < 0) continue;
      d = scaled_determinant(bvp, z, models[s], ctrl);
    } else {
      d = char_determinant(bvp, z, ctrl);
    }
    csv.row({num(z.real()), num(z.imag()), num(d.real()), num(d.imag()), num(std::abs(d))});
  }
  return kOk;
}

int run_asymptotics(const Options& o, std::ostream& os) {
  const DiracBVP bvp = load_bvp(o.input);
  const std::vector<SectorModel> models = sector_models(bvp);
  if (o.scan.empty()) {
    json arr = json::array();
    for (const SectorModel& m : models) arr.push_back(to_json(m));
    emit_json(os, {{"sectors", arr}});
    return kOk;
  }
  const auto ts = split_numbers(o.scan, "--scan");
  const StepControl ctrl = step_control(o);
  Csv csv(os, {"sector", "t", "re_lambda", "im_lambda", "err_order0", "err_order1"});
  for (const SectorModel& m : models) {
    const double phi = 0.5 * (m.geometry.phi_start + m.geometry.phi_end);
    for (double t : ts) {
      const cplx z = std::polar(t, phi);
      const cplx d = char_determinant(bvp, z, ctrl);
      const double e0 = std::abs(d / delta_model(z, m, 0) - 1.0);
      const std::string e1 = m.omega1 ? num(std::abs(d / delta_model(z, m, 1) - 1.0)) : "nan";
      csv.row({std::to_string(m.sector), num(t), num(z.real()), num(z.imag()), num(e0), e1});
    }
  }
  return kOk;
}

int run_rootfns(const Options& o, std::ostream& os) {
  const DiracBVP bvp = load_bvp(o.input);
  const cplx lambda = parse_lambda(o.lambda);
  if (o.multiplicity < 1) throw ValidationError("--multiplicity must be at least 1");
  const int N = o.grid > 0 ? o.grid : 256;
  RootControl rc;
  rc.step = step_control(o);
  const auto chains = root_chains(bvp, lambda, o.multiplicity, uniform_grid(N), rc);
  std::vector<std::string> header{"x"};
  for (std::size_t c = 0; c < chains.size(); ++c)
    for (std::size_t p = 0; p < chains[c].functions.size(); ++p)
      for (int k = 0; k < bvp.n(); ++k) {
        const std::string tag = std::to_string(c) + "_" + std::to_string(p) + "_" + std::to_string(k + 1);
        header.push_back("re_u" + tag);
        header.push_back("im_u" + tag);
      }
  Csv csv(os, header);
  for (int i = 0; i <= N; ++i) {
    std::vector<std::string> row{num(static_cast<double>(i) / N)};
    for (const RootChain& ch : chains)
      for (const CMatrix& u : ch.functions)
        for (int k = 0; k < bvp.n(); ++k) {
          row.push_back(num(u(k, i).real()));
          row.push_back(num(u(k, i).imag()));
        }
    csv.row(row);
  }
  return kOk;
}

int run_green(const Options& o, std::ostream& os) {
  const DiracBVP bvp = load_bvp(o.input);
  const cplx lambda = parse_lambda(o.lambda);
  std::vector<std::pair<double, double>> pairs;
  if (!o.at.empty()) {
    const auto v = split_numbers(o.at, "--at");
    if (v.size() != 2) throw ValidationError("--at expects x,t");
    pairs.emplace_back(v[0], v[1]);
  } else {
    const int N = o.grid > 0 ? o.grid : 16;
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j) pairs.emplace_back(static_cast<double>(i) / N, static_cast<double>(j) / N);
  }
  for (const auto& [x, t] : pairs)
    if (x < 0 || x > 1 || t < 0 || t > 1) throw ValidationError("--at: x and t must lie in [0,1]");
  const GreenEvaluation g = green_function(bvp, lambda, pairs, step_control(o));
  Csv csv(os, {"x", "t", "row", "col", "re", "im"});
  for (std::size_t p = 0; p < pairs.size(); ++p)
    for (int r = 0; r < bvp.n(); ++r)
      for (int c = 0; c < bvp.n(); ++c) {
        const cplx v = g.values[p](r, c);
        csv.row({num(pairs[p].first), num(pairs[p].second), std::to_string(r + 1), std::to_string(c + 1),
                 num(v.real()), num(v.imag())});
      }
  return kOk;
}

int run_svalues(const Options& o, std::ostream& os) {
  const DiracBVP bvp = load_bvp(o.input);
  const cplx lambda = parse_lambda(o.lambda);
  SValueControl sc;
  sc.seed = o.seed;
  sc.step = step_control(o);
  const SValueProfile p = svalue_profile(bvp, lambda, o.grid > 0 ? o.grid : 1024, sc);
  Csv csv(os, {"series", "weight", "k", "s", "normalized"});
  for (std::size_t j = 0; j < p.series.size(); ++j)
    for (std::size_t k = 0; k < p.series[j].size(); ++k)
      csv.row({std::to_string(j + 1), num(p.weights[j]), std::to_string(k + 1), num(p.series[j][k]),
               num(p.normalized[j][k])});
  return kOk;
}

int run_trace_diff(const Options& o, std::ostream& os) {
  if (o.input2.empty()) throw ValidationError("trace-diff needs two system files");
  const DiracBVP a = load_bvp(o.input), b = load_bvp(o.input2);
  const cplx lambda = parse_lambda(o.lambda);
  const int N = o.grid > 0 ? o.grid : 2048;
  const StepControl ctrl = step_control(o);
  const cplx formula = trace_formula_diff(a, b, lambda, N, ctrl);
  const cplx kernel = nystrom_trace(a, lambda, N, ctrl) - nystrom_trace(b, lambda, N, ctrl);
  if (o.format == "json") {
    emit_json(os, {{"lambda", complex_to_json(lambda)},
                   {"N", N},
                   {"formula", complex_to_json(formula)},
                   {"kernel_trace", complex_to_json(kernel)}});
  } else {
    Csv csv(os, {"method", "re", "im"});
    csv.row({"formula", num(formula.real()), num(formula.imag())});
    csv.row({"kernel_trace", num(kernel.real()), num(kernel.imag())});
  }
  return kOk;
}

int run_gauge(const Options& o, std::ostream& os) {
  const DiracBVP bvp = load_bvp(o.input);
  const GaugeResult g = gauge_normalize(bvp, o.grid > 0 ? o.grid : kGaugeCells, step_control(o));
  emit_json(os, bvp_to_json(g.bvp));
  return kOk;
}

int run_timoshenko(const Options& o, std::ostream& os) {
  const BeamModel beam = load_beam(o.input);
  const ReductionResult red = reduce_to_dirac(beam);
  json out;
  out["b1"] = red.b1;
  out["b2"] = red.b2;
  out["h1_end"] = red.h1_end;
  out["h2_end"] = red.h2_end;
  if (!o.emit_dirac.empty()) {
    std::ofstream f(o.emit_dirac);
    if (!f) throw ValidationError("cannot write '" + o.emit_dirac + "'");
    emit_json(f, bvp_to_json(red.dirac));
    out["dirac"] = o.emit_dirac;
  }
  if (o.conditions) out["conditions"] = to_json(beam_conditions(red, beam));
  int code = kOk;
  if (!o.beam_spectrum.empty()) {
    const SpectrumSlice s = locate_eigenvalues(red.dirac, parse_region(o.beam_spectrum), o.tol, step_control(o));
    out["spectrum"] = to_json(s);
    if (!s.unresolved.empty()) code = kNumerical;
  }
  emit_json(os, out);
  return code;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral analysis of first-order boundary value problems", "dspec"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool input = true) {
    if (input) sub->add_option("input", o.input, "system JSON file")->required();
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--tol", o.tol, "eigenvalue tolerance");
    sub->add_option("--steps", o.steps, "base integration steps per unit length");
    sub->add_option("--grid", o.grid, "grid size N");
    sub->add_option("--seed", o.seed, "seed for probe randomness");
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };

  std::vector<std::pair<CLI::App*, int (*)(const Options&, std::ostream&)>> subs;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&, std::ostream&)) {
    CLI::App* s = app.add_subcommand(name, help);
    common(s);
    subs.emplace_back(s, fn);
    return s;
  };

  add("fan", "separating lines, sectors and det T per sector", run_fan);
  add("classify", "regularity, completeness, normality, dissipativity and Riesz verdicts", run_classify);
  auto* spectrum = add("spectrum", "eigenvalues in a rectangle", run_spectrum);
  spectrum->add_option("--region", o.region, "x0,x1,y0,y1");
  spectrum->add_option("--group-eps", o.group_eps, "group eigenvalues into Riesz blocks");
  spectrum->add_option("--angles", o.angles, "grouping rays a1,a2,...");
  auto* detscan = add("detscan", "samples of the characteristic determinant", run_detscan);
  detscan->add_option("--region", o.region, "x0,x1,y0,y1");
  detscan->add_option("--ray", o.ray, "ray angle");
  detscan->add_option("--rmax", o.rmax, "ray length");
  detscan->add_option("--samples", o.samples, "samples per axis or along the ray");
  detscan->add_flag("--scaled", o.scaled, "divide by the sector model scale");
  auto* asym = add("asymptotics", "per-sector γ, τ, ω₀, ω₁", run_asymptotics);
  asym->add_option("--scan", o.scan, "radii t1,t2,... for a bisector comparison CSV");
  auto* rootfns = add("rootfns", "eigenfunctions and associated functions", run_rootfns);
  rootfns->add_option("--lambda", o.lambda, "re,im")->required();
  rootfns->add_option("--multiplicity", o.multiplicity, "algebraic multiplicity");
  auto* green = add("green", "Green's function samples", run_green);
  green->add_option("--lambda", o.lambda, "re,im")->required();
  green->add_option("--at", o.at, "x,t");
  auto* sval = add("svalues", "singular values of the resolvent", run_svalues);
  sval->add_option("--lambda", o.lambda, "re,im")->required();
  sval->add_option("--N", o.grid, "discretization size");
  auto* trace = add("trace-diff", "trace of a resolvent difference", run_trace_diff);
  trace->add_option("second", o.input2, "second system JSON file")->required();
  trace->add_option("--lambda", o.lambda, "re,im")->required();
  add("gauge", "remove diagonal blocks of the potential", run_gauge);
  auto* beam = add("timoshenko", "reduce a beam model and check its conditions", run_timoshenko);
  beam->add_option("--emit-dirac", o.emit_dirac, "write the reduced system here");
  beam->add_flag("--conditions", o.conditions, "evaluate the completeness and basis conditions");
  beam->add_option("--spectrum", o.beam_spectrum, "x0,x1,y0,y1");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "dspec: " << e.what() << '\n';
    return kUsage;
  }

  for (auto& [sub, fn] : subs) {
    if (!sub->parsed()) continue;
    try {
      std::unique_ptr<std::ofstream> file;
      std::ostream* os = &out;
      std::ostringstream buffer;
      const int code = fn(o, buffer);
      if (!o.out.empty()) {
        file = std::make_unique<std::ofstream>(o.out);
        if (!*file) throw ValidationError("cannot write '" + o.out + "'");
        os = file.get();
      }
      *os << buffer.str();
      return code;
    } catch (const ValidationError& e) {
      err << "dspec: invalid input: " << e.what() << '\n';
      return kInvalid;
    } catch (const NumericalError& e) {
      err << "dspec: numerical failure: " << e.what() << '\n';
      return kNumerical;
    } catch (const PreconditionError& e) {
      err << "dspec: " << e.what() << '\n';
      return kNumerical;
    }
  }
  return kUsage;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace dspec::cli

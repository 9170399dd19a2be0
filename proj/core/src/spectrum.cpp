#include "dspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace dspec {

namespace {

constexpr double kPhaseStep = kPi / 4;
constexpr double kMinCell = 1e-8;
constexpr int kMaxCircleSamples = 1024;
constexpr int kMaxDoublings = 4;
constexpr double kSplitFractions[] = {0.5123, 0.4729, 0.5419, 0.4387, 0.37, 0.63};

cplx checked(const AnalyticFn& f, cplx z) {
  const cplx v = f(z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalError("function value overflowed");
  if (v == cplx(0.0)) throw BoundaryZero("exact zero on contour");
  return v;
}

double adapt(const AnalyticFn& f, cplx za, cplx fa, cplx zb, cplx fb, int depth) {
  const double d = std::arg(fb / fa);
  if (std::abs(d) <= kPhaseStep) return d;
  if (depth > 48 || std::abs(zb - za) < 1e-11 * (1.0 + std::abs(za)))
    throw BoundaryZero("zero on or near the contour");
  const cplx zm = 0.5 * (za + zb);
  const cplx fm = checked(f, zm);
  return adapt(f, za, fa, zm, fm, depth + 1) + adapt(f, zm, fm, zb, fb, depth + 1);
}

double polygon_phase(const AnalyticFn& f, const std::vector<cplx>& v, double density) {
  double total = 0.0;
  for (std::size_t e = 0; e < v.size(); ++e) {
    const cplx a = v[e], b = v[(e + 1) % v.size()];
    const int pieces = 4 + static_cast<int>(std::ceil(std::abs(b - a) * density));
    cplx za = a, fa = checked(f, a);
    for (int i = 1; i <= pieces; ++i) {
      const cplx zb = a + (b - a) * (static_cast<double>(i) / pieces);
      const cplx fb = checked(f, zb);
      total += adapt(f, za, fa, zb, fb, 0);
      za = zb;
      fa = fb;
    }
  }
  return total;
}

std::vector<cplx> rect_vertices(const Rect& r) {
  return {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
}

struct CircleSamples {
  std::vector<cplx> z, f;
  std::vector<double> phase;  // unwrapped arg of f
};

CircleSamples circle_samples(const AnalyticFn& f, cplx c, double r, int max_samples) {
  for (int K = 64; K <= max_samples; K *= 2) {
    CircleSamples s;
    s.z.resize(K);
    s.f.resize(K);
    for (int k = 0; k < K; ++k) {
      s.z[k] = c + r * std::polar(1.0, 2 * kPi * k / K);
      s.f[k] = checked(f, s.z[k]);
    }
    bool ok = true;
    s.phase.assign(K + 1, std::arg(s.f[0]));
    for (int k = 1; k <= K && ok; ++k) {
      const double d = std::arg(s.f[k % K] / s.f[k - 1]);
      ok = std::abs(d) <= kPhaseStep;
      s.phase[k] = s.phase[k - 1] + d;
    }
    if (ok) return s;
  }
  throw BoundaryZero("circle passes too close to a zero");
}

int circle_winding(const CircleSamples& s) {
  return static_cast<int>(std::lround((s.phase.back() - s.phase.front()) / (2 * kPi)));
}

// Mean of the N zeros inside the circle: N·c − (1/2πi)∮ log(f/(λ−c)^N) dλ, times 1/N.
cplx circle_mean(const CircleSamples& s, cplx c, double r, int N) {
  const int K = static_cast<int>(s.z.size());
  cplx acc = 0.0;
  for (int k = 0; k < K; ++k) {
    const double theta = 2 * kPi * k / K;
    const cplx logg(std::log(std::abs(s.f[k])) - N * std::log(r), s.phase[k] - N * theta);
    acc += logg * std::polar(1.0, theta);
  }
  return c - r * acc / (static_cast<double>(N) * K);
}

class Locator {
public:
  Locator(const AnalyticFn& f, double tol, double frequency) : f_(f), tol_(tol), freq_(frequency) {}

  void process(const Rect& cell, int count, SpectrumSlice& out) {
    if (count == 0) return;
    if (count < 0) {
      out.unresolved.push_back({cell, count});
      return;
    }
    const double diam = std::hypot(cell.width(), cell.height());
    if (diam * freq_ <= 2.0 || (count == 1 && diam * freq_ <= 8.0)) {
      if (const auto z = refine(cell, count)) {
        out.eigenvalues.push_back({*z, count});
        out.residual = std::max(out.residual, std::abs(f_(*z)));
        return;
      }
    }
    if (std::max(cell.width(), cell.height()) < kMinCell) {
      out.eigenvalues.push_back({cell.center(), count});
      out.residual = std::max(out.residual, std::abs(f_(cell.center())));
      return;
    }
    for (double frac : kSplitFractions) {
      try {
        const auto kids = split(cell, frac);
        std::vector<int> counts;
        for (const auto& k : kids) counts.push_back(winding(k));
        if (std::accumulate(counts.begin(), counts.end(), 0) != count) continue;
        for (std::size_t i = 0; i < kids.size(); ++i) process(kids[i], counts[i], out);
        return;
      } catch (const BoundaryZero&) {
      }
    }
    out.unresolved.push_back({cell, count});
  }

  int winding(const Rect& r) const { return winding_number(f_, rect_vertices(r), freq_); }

private:
  static std::vector<Rect> split(const Rect& c, double frac) {
    const double w = c.width(), h = c.height();
    const double xm = c.x0 + frac * w, ym = c.y0 + (1.0 - frac) * h;
    if (w > 2 * h) return {{c.x0, xm, c.y0, c.y1}, {xm, c.x1, c.y0, c.y1}};
    if (h > 2 * w) return {{c.x0, c.x1, c.y0, ym}, {c.x0, c.x1, ym, c.y1}};
    return {{c.x0, xm, c.y0, ym}, {xm, c.x1, c.y0, ym}, {c.x0, xm, ym, c.y1}, {xm, c.x1, ym, c.y1}};
  }

  std::optional<cplx> refine(const Rect& cell, int N) const {
    cplx c = cell.center();
    double r = 0.5 * std::hypot(cell.width(), cell.height()) * 1.0001;
    try {
      for (int it = 0; it < 40; ++it) {
        const double floor = std::max(10 * tol_, 1e-6 * (1.0 + std::abs(c)));
        r = std::max(r, floor);
        const auto s = circle_samples(f_, c, r, kMaxCircleSamples);
        if (circle_winding(s) != N) return std::nullopt;
        const cplx mean = circle_mean(s, c, r, N);
        if (!cell.contains(mean)) return std::nullopt;
        if (r <= floor) {
          c = mean;
          break;
        }
        c = mean;
        r = r / 16;
      }
    } catch (const BoundaryZero&) {
      return std::nullopt;
    }
    if (N == 1) c = polish(c);
    if (!cell.contains(c)) return std::nullopt;
    return c;
  }

  cplx polish(cplx c) const {
    const double h = 1e-7 * (1.0 + std::abs(c));
    cplx z0 = c + h, z1 = c;
    cplx f0 = f_(z0), f1 = f_(z1);
    for (int it = 0; it < 50; ++it) {
      if (f1 == f0) break;
      const cplx step = f1 * (z1 - z0) / (f1 - f0);
      z0 = z1;
      f0 = f1;
      z1 -= step;
      f1 = f_(z1);
      if (std::abs(step) < tol_) break;
    }
    return std::abs(z1 - c) < 1e-4 * (1.0 + std::abs(c)) ? z1 : c;
  }

  const AnalyticFn& f_;
  double tol_;
  double freq_;
};

double bvp_frequency(const DiracBVP& bvp) {
  double s = 0.0;
  for (const auto& b : bvp.weight.b) s += std::abs(b);
  return std::max(1.0, s);
}

}  // namespace

int winding_number(const AnalyticFn& f, const std::vector<cplx>& vertices, double frequency) {
  double density = 2.0 * std::max(frequency, 0.5);
  long prev = std::lround(polygon_phase(f, vertices, density) / (2 * kPi));
  for (int d = 0; d < kMaxDoublings; ++d) {
    density *= 2;
    const long next = std::lround(polygon_phase(f, vertices, density) / (2 * kPi));
    if (next == prev) return static_cast<int>(next);
    prev = next;
  }
  throw NumericalError("contour winding did not stabilize");
}

int winding_on_circle(const AnalyticFn& f, cplx center, double radius) {
  return circle_winding(circle_samples(f, center, radius, 8 * kMaxCircleSamples));
}

int count_zeros(const AnalyticFn& f, Rect& region, const ContourControl& cc) {
  for (int attempt = 0; attempt <= cc.max_dilations; ++attempt) {
    try {
      return winding_number(f, rect_vertices(region), cc.frequency);
    } catch (const BoundaryZero&) {
      region = region.dilated(cc.dilation * std::max(region.width(), region.height()));
    }
  }
  throw BoundaryZero("persistent zero on the region boundary");
}

int count_zeros(const DiracBVP& bvp, const Rect& region, const StepControl& ctrl) {
  require_valid(bvp);
  Rect r = region;
  ContourControl cc;
  cc.frequency = bvp_frequency(bvp);
  return count_zeros([&](cplx l) { return char_determinant(bvp, l, ctrl); }, r, cc);
}

SpectrumSlice locate_zeros(const AnalyticFn& f, const Rect& region, double tol, const ContourControl& cc) {
  if (!(region.width() > 0 && region.height() > 0)) throw PreconditionError("region must have positive area");
  if (!(tol > 0)) throw PreconditionError("tol must be positive");
  SpectrumSlice s;
  s.region = region;
  s.total_count = count_zeros(f, s.region, cc);
  Locator loc(f, tol, cc.frequency);
  loc.process(s.region, s.total_count, s);
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
    return a.value.real() != b.value.real() ? a.value.real() < b.value.real() : a.value.imag() < b.value.imag();
  });
  return s;
}

SpectrumSlice locate_eigenvalues(const DiracBVP& bvp, const Rect& region, double tol, const StepControl& ctrl) {
  require_valid(bvp);
  ContourControl cc;
  cc.frequency = bvp_frequency(bvp);
  return locate_zeros([&](cplx l) { return char_determinant(bvp, l, ctrl); }, region, tol, cc);
}

RieszBlocks group_blocks(const std::vector<cplx>& eigs, const std::vector<double>& angles, double epsilon) {
  if (!(epsilon > 0)) throw PreconditionError("epsilon must be positive");
  const int m = static_cast<int>(eigs.size());
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<int> first_ray(m, -1);
  std::vector<double> first_proj(m, 0.0);
  for (std::size_t r = 0; r < angles.size(); ++r) {
    const cplx dir = std::polar(1.0, -angles[r]);
    std::vector<std::pair<double, int>> near;
    for (int i = 0; i < m; ++i) {
      const double mod = std::abs(eigs[i]);
      bool ok = mod < epsilon;
      if (!ok) {
        const double d = std::abs(std::remainder(std::arg(eigs[i]) - angles[r], 2 * kPi));
        ok = d < epsilon;
      }
      if (!ok) continue;
      const double p = (eigs[i] * dir).real();
      near.emplace_back(p, i);
      if (first_ray[i] < 0) {
        first_ray[i] = static_cast<int>(r);
        first_proj[i] = p;
      }
    }
    std::sort(near.begin(), near.end());
    for (std::size_t k = 1; k < near.size(); ++k)
      if (near[k].first - near[k - 1].first < epsilon) parent[find(near[k].second)] = find(near[k - 1].second);
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(m, -1);
  for (int i = 0; i < m; ++i) {
    const int root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  struct Keyed {
    int ray;
    double proj;
    std::vector<int> members;
  };
  std::vector<Keyed> keyed;
  for (auto& g : groups) {
    int ray = -1;
    for (int i : g)
      if (first_ray[i] >= 0 && (ray < 0 || first_ray[i] < ray)) ray = first_ray[i];
    double proj = 0.0;
    if (ray >= 0) {
      const cplx dir = std::polar(1.0, -angles[ray]);
      std::sort(g.begin(), g.end(), [&](int a, int b) { return (eigs[a] * dir).real() < (eigs[b] * dir).real(); });
      proj = (eigs[g.front()] * dir).real();
    } else {
      proj = eigs[g.front()].real();
    }
    keyed.push_back({ray, proj, g});
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    const int ra = a.ray < 0 ? 1 << 30 : a.ray, rb = b.ray < 0 ? 1 << 30 : b.ray;
    return ra != rb ? ra < rb : a.proj < b.proj;
  });
  RieszBlocks out;
  out.angles = angles;
  out.epsilon = epsilon;
  for (auto& k : keyed) {
    out.blocks.push_back(std::move(k.members));
    out.ray.push_back(k.ray);
  }
  return out;
}

std::vector<cplx> reference_spectrum(const RieszVerdict& verdict, int K) {
  if (verdict.kind != RieszKind::basis_with_parentheses || verdict.lattice_steps.empty())
    throw PreconditionError("boundary problem does not match a normal-model lattice pattern");
  std::vector<cplx> out;
  for (const cplx step : verdict.lattice_steps)
    for (int k = -K; k <= K; ++k) {
      const cplx z = 2 * kPi * static_cast<double>(k) / step;
      if (std::none_of(out.begin(), out.end(), [&](cplx w) { return std::abs(w - z) < 1e-12 * (1 + std::abs(z)); }))
        out.push_back(z);
    }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return out;
}

}  // namespace dspec

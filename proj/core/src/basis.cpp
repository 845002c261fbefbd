#include "berggren/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "berggren/errors.hpp"

namespace berggren {

int ContourSpec::total_nodes() const {
  return std::accumulate(n_per_segment.begin(), n_per_segment.end(), 0);
}

void ContourSpec::validate() const {
  if (vertices.size() < 2) throw ConfigurationError("contour needs at least two vertices");
  if (n_per_segment.size() + 1 != vertices.size()) {
    throw ConfigurationError("contour needs one node count per segment");
  }
  if (vertices.front().imag() != 0.0 || vertices.back().imag() != 0.0) {
    throw ConfigurationError("contour must start and end on the real axis");
  }
  if (vertices.front().real() < 0.0 || vertices.back().real() <= vertices.front().real()) {
    throw ConfigurationError("contour requires 0 <= k_min < k_max");
  }
  for (int n : n_per_segment) {
    if (n < 1) throw ConfigurationError("every contour segment needs at least one node");
  }
  for (std::size_t s = 0; s + 1 < vertices.size(); ++s) {
    if (vertices[s] == vertices[s + 1]) throw ConfigurationError("zero-length contour segment");
    if (vertices[s].imag() > 0.0) throw ConfigurationError("contour must stay in Im k <= 0");
  }
}

ContourSpec default_contour(const PartialWave& pw, double k_min, int n_gl) {
  if (n_gl <= 0 || n_gl % 3 != 0) {
    throw ConfigurationError("N_GL must be a positive multiple of 3, got " + std::to_string(n_gl));
  }
  const bool d32 = pw.ell == 2 && pw.two_j == 3;
  const cplx corner = d32 ? cplx{0.4, -0.39} : cplx{0.25, -0.1};
  ContourSpec spec{{cplx{k_min, 0.0}, corner, cplx{1.0, 0.0}, cplx{4.0, 0.0}},
                   {n_gl / 3, n_gl / 3, n_gl / 3}};
  spec.validate();
  return spec;
}

ComplexRule gauss_legendre_on_contour(const ContourSpec& spec) {
  spec.validate();
  ComplexRule out;
  for (int s = 0; s < spec.segments(); ++s) {
    const ComplexRule seg = gauss_legendre_segment(spec.n_per_segment[s], spec.vertices[s],
                                                   spec.vertices[s + 1]);
    out.nodes.insert(out.nodes.end(), seg.nodes.begin(), seg.nodes.end());
    out.weights.insert(out.weights.end(), seg.weights.begin(), seg.weights.end());
  }
  return out;
}

double kmin_condition(double k, const PotentialParams& p, const PartialWave& pw, double R) {
  const cplx eta = sommerfeld(cplx{k, 0.0}, p.Z_c, p);
  const CoulombValue f = coulomb_F({pw.ell, eta}, cplx{k * R, 0.0});
  return std::abs(f.value) + std::abs(k * f.derivative);
}

double resolve_kmin(const PotentialParams& p, const PartialWave& pw, double R, double target) {
  if (p.Z_c <= 0.0) throw ConfigurationError("resolve_kmin: requires a charged partial wave");
  constexpr double kHi = 0.3;
  // Condition values on a coarse grid; points where F underflows or its
  // evaluation fails deep in the barrier count as zero.
  auto value = [&](double k) {
    try {
      return kmin_condition(k, p, pw, R);
    } catch (const Error&) {
      return 0.0;
    }
  };
  constexpr int kScan = 60;
  double lo = 0.0;
  double prev = 0.0;
  bool bracketed = false;
  for (int i = 1; i <= kScan; ++i) {
    const double k = kHi * i / kScan;
    const double v = value(k);
    if (v < prev) {
      throw ConfigurationError("resolve_kmin: condition is not monotonic on (0, 0.3]");
    }
    if (v >= target) {
      bracketed = true;
      break;
    }
    lo = k;
    prev = v;
  }
  if (!bracketed) throw ConfigurationError("resolve_kmin: no sign change on (0, 0.3]");
  double hi = lo + kHi / kScan;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool below_contour(cplx k, const ContourSpec& spec) {
  if (k.imag() >= 0.0) return false;
  // Even-odd rule on the polygon closed along the real axis.
  bool inside = false;
  const std::size_t n = spec.vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const cplx a = spec.vertices[i];
    const cplx b = spec.vertices[j];
    if ((a.imag() > k.imag()) != (b.imag() > k.imag())) {
      const double x = a.real() + (k.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (k.real() < x) inside = !inside;
    }
  }
  return inside;
}

std::vector<BerggrenState> basis_poles(const PotentialParams& p, const PartialWave& pw,
                                       const RadialGrid& grid, const ContourSpec& spec) {
  std::vector<BerggrenState> out;
  for (const cplx seed : scan_poles(p, pw, grid.R)) {
    const bool axis = std::abs(seed.real()) < std::abs(seed.imag()) && seed.imag() > 0.0;
    const bool wanted = axis || below_contour(seed, spec);
    BerggrenState s;
    try {
      s = find_pole(axis ? cplx{0.0, seed.imag()} : seed, p, pw, grid);
    } catch (const Error&) {
      // Broad poles outside the contour are irrelevant to the basis.
      if (wanted) throw;
      continue;
    }
    if (s.kind != StateKind::bound && !below_contour(s.k, spec)) continue;
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const BerggrenState& o) {
      return std::abs(o.k - s.k) < 1e-8 * (1.0 + std::abs(s.k));
    });
    if (!duplicate) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const BerggrenState& a, const BerggrenState& b) {
    return a.e.real() < b.e.real();
  });
  return out;
}

DiscretizedBasis build_basis(const ContourSpec& spec, std::vector<BerggrenState> poles,
                             const PotentialParams& p, const PartialWave& pw,
                             const RadialGrid& grid) {
  spec.validate();
  for (const auto& pole : poles) {
    if (!pole.discrete()) throw ConfigurationError("build_basis: pole list holds a scattering state");
  }
  const ComplexRule rule = gauss_legendre_on_contour(spec);
  DiscretizedBasis basis;
  basis.contour = spec;
  basis.potential = p;
  basis.pw = pw;
  basis.grid = grid;
  basis.n_res = static_cast<int>(poles.size());
  basis.states = std::move(poles);
  basis.states.reserve(basis.states.size() + rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    try {
      BerggrenState s = make_scattering(rule.nodes[i], p, pw, grid);
      s.w = rule.weights[i];
      basis.states.push_back(std::move(s));
    } catch (const NearPoleError& e) {
      throw NearPoleError("contour node " + std::to_string(i) + ": " + e.what() +
                          "; adjust the contour");
    }
  }
  return basis;
}

DiscretizedBasis build_default_basis(const PotentialParams& p, const PartialWave& pw, int n_gl,
                                     const RadialGrid& grid) {
  const double k_min = resolve_kmin(p, pw, grid.R);
  const ContourSpec spec = default_contour(pw, k_min, n_gl);
  return build_basis(spec, basis_poles(p, pw, grid, spec), p, pw, grid);
}

}  // namespace berggren

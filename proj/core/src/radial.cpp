#include "berggren/radial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "berggren/errors.hpp"
#include "berggren/quadrature.hpp"
#include "ode.hpp"

namespace berggren {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;
constexpr double kStartRadius = 1e-6;
constexpr double kRescaleAbove = 1e150;

// Beyond this value of Re(pi eta) a scattering state is smaller than 1e-87
// everywhere inside the matching radius and is stored as zero.
constexpr double kNegligiblePiEta = 200.0;

// Coefficient of the radial equation u'' = q(r) u.
struct RadialCoefficient {
  const PotentialParams* p;
  const PartialWave* pw;
  double R;
  cplx e_scaled;  // e / (hbar^2/2m) = k^2
  cplx coulomb;   // 2 eta k, the point Coulomb strength beyond R
  double ll;

  cplx operator()(cplx s) const {
    const double r = s.real();
    if (r <= R) return ll / (r * r) + v_total(r, *p, *pw) / p->hbar2_over_2m - e_scaled;
    return ll / (r * r) + coulomb / r - e_scaled;
  }
};

std::string format_k(cplx k) {
  std::ostringstream os;
  os.precision(12);
  os << k.real() << (k.imag() < 0 ? "-" : "+") << std::abs(k.imag()) << "i";
  return os.str();
}

StateKind classify_pole(cplx k) {
  return (k.imag() > 0.0 && std::abs(k.real()) < 1e-6 * std::abs(k)) ? StateKind::bound
                                                                      : StateKind::resonant;
}

}  // namespace

const char* to_string(StateKind kind) {
  switch (kind) {
    case StateKind::bound:
      return "bound";
    case StateKind::resonant:
      return "resonant";
    case StateKind::scattering:
      return "scattering";
  }
  return "?";
}

RadialGrid RadialGrid::make(double R, int n_nodes, int n_probe) {
  if (!(R > 0.0) || n_nodes < 1 || n_probe < 1) {
    throw ConfigurationError("radial grid needs R > 0 and positive node counts");
  }
  RadialGrid g;
  g.R = R;
  auto rule = gauss_legendre(n_nodes, 0.0, R);
  g.nodes = std::move(rule.nodes);
  g.weights = std::move(rule.weights);
  g.probe.resize(n_probe);
  for (int j = 1; j <= n_probe; ++j) g.probe[j - 1] = j * R / n_probe;
  return g;
}

cplx sommerfeld(cplx k, double Z, const PotentialParams& p) {
  if (k == 0.0) throw DomainError("Sommerfeld parameter undefined at k = 0");
  return Z * p.C_c / (2.0 * p.hbar2_over_2m * k);
}

RegularSolution integrate_regular(cplx k, const PotentialParams& p, const PartialWave& pw,
                                  double R, std::span<const double> radii) {
  if (!std::is_sorted(radii.begin(), radii.end()) || (!radii.empty() && radii.front() <= 0.0)) {
    throw DomainError("integrate_regular: radii must be positive and sorted");
  }
  const int l = pw.ell;
  const RadialCoefficient q{&p, &pw, R, k * k, 2.0 * sommerfeld(k, p.Z_c, p) * k,
                            double(l) * (l + 1)};

  const double r0 = std::min(kStartRadius, radii.empty() ? kStartRadius : 0.5 * radii.front());
  const double a1 = v_total_inverse_r_coefficient(p, pw) / p.hbar2_over_2m / (2.0 * (l + 1));
  const double r0l = std::pow(r0, l);
  detail::OdeState y{cplx(r0l * r0 * (1.0 + a1 * r0)),
                     cplx(r0l * ((l + 1) + a1 * (l + 2) * r0))};

  RegularSolution out;
  out.samples.resize(radii.size());
  auto prop = detail::make_propagator(cplx{0.0, 0.0}, cplx{1.0, 0.0}, q);
  double t = r0;

  auto rescale_if_needed = [&](std::size_t filled) {
    if (std::abs(y[0]) <= kRescaleAbove && std::abs(y[1]) <= kRescaleAbove) return;
    const double f = 1.0 / kRescaleAbove;
    y[0] *= f;
    y[1] *= f;
    for (std::size_t i = 0; i < filled; ++i) out.samples[i] *= f;
    out.u_R *= f;
    out.du_R *= f;
    out.log_scale += std::log(kRescaleAbove);
  };

  std::size_t i = 0;
  bool at_R = false;
  out.u_R = out.du_R = 0.0;
  while (i < radii.size() || !at_R) {
    const bool next_is_R = !at_R && (i == radii.size() || radii[i] >= R);
    const double target = next_is_R ? R : radii[i];
    prop.advance(y, t, target);
    if (!std::isfinite(std::abs(y[0]))) {
      throw DomainError("integrate_regular: non-finite solution at k = " + format_k(k));
    }
    if (next_is_R) {
      at_R = true;
      out.u_R = y[0];
      out.du_R = y[1];
      if (i < radii.size() && radii[i] == R) out.samples[i++] = y[0];
    } else {
      out.samples[i++] = y[0];
    }
    rescale_if_needed(i);
  }
  return out;
}

InteriorSolution integrate_interior(cplx k, const PotentialParams& p, const PartialWave& pw,
                                    const RadialGrid& grid) {
  if (k == 0.0) throw DomainError("integrate_interior: k = 0");
  std::vector<double> radii;
  radii.reserve(grid.nodes.size() + grid.probe.size());
  radii.insert(radii.end(), grid.nodes.begin(), grid.nodes.end());
  radii.insert(radii.end(), grid.probe.begin(), grid.probe.end());
  std::vector<std::size_t> order(radii.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
  std::vector<double> sorted(radii.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = radii[order[i]];

  const RegularSolution sol = integrate_regular(k, p, pw, grid.R, sorted);
  InteriorSolution out;
  out.u.resize(grid.nodes.size());
  out.u_probe.resize(grid.probe.size());
  const std::size_t n_nodes = grid.nodes.size();
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t src = order[i];
    if (src < n_nodes) {
      out.u[src] = sol.samples[i];
    } else {
      out.u_probe[src - n_nodes] = sol.samples[i];
    }
  }
  out.u_R = sol.u_R;
  out.du_R = sol.du_R;
  return out;
}

MatchingCoefficients match(cplx k, cplx eta, int ell, double R, cplx u_R, cplx du_R) {
  const CoulombParams cp{ell, eta};
  const cplx rho = k * R;
  const CoulombValue hp = coulomb_H(Sign::plus, cp, rho);
  const CoulombValue hm = coulomb_H(Sign::minus, cp, rho);
  // W(H+, H-) = H+ H-' - H+' H- = -2i, derivatives taken in rho.
  const cplx wr = -2.0 * kI;
  const cplx du_rho = du_R / k;
  return {(u_R * hm.derivative - du_rho * hm.value) / wr,
          (du_rho * hp.value - u_R * hp.derivative) / wr};
}

BerggrenState make_scattering(cplx k, const PotentialParams& p, const PartialWave& pw,
                              const RadialGrid& grid, std::optional<cplx> reference_scale) {
  if (k == 0.0) throw DomainError("make_scattering: k = 0");
  BerggrenState s;
  s.kind = StateKind::scattering;
  s.pw = pw;
  s.k = k;
  s.e = p.hbar2_over_2m * k * k;
  s.eta = sommerfeld(k, p.Z_c, p);
  s.R = grid.R;
  if ((kPi * s.eta).real() > kNegligiblePiEta) {
    s.negligible = true;
    s.u_interior.assign(grid.nodes.size(), 0.0);
    s.u_probe.assign(grid.probe.size(), 0.0);
    s.u_R = s.du_R = s.C_plus = s.C_minus = 0.0;
    s.scale = 0.0;
    return s;
  }

  InteriorSolution in = integrate_interior(k, p, pw, grid);
  const MatchingCoefficients m = match(k, s.eta, pw.ell, grid.R, in.u_R, in.du_R);
  // At a pole the incoming part of u vanishes at R. The coefficients alone
  // are no test, since |H+/H-| is exponentially large or small for complex
  // eta far from any pole.
  const CoulombParams cp{pw.ell, s.eta};
  const double out_amp = std::abs(m.C_plus * coulomb_H(Sign::plus, cp, k * grid.R).value);
  const double in_amp = std::abs(m.C_minus * coulomb_H(Sign::minus, cp, k * grid.R).value);
  const double big = std::max(out_amp, in_amp);
  const double small = std::min(out_amp, in_amp);
  if (!(small > 1e-13 * big)) {
    throw NearPoleError("make_scattering: k = " + format_k(k) + " sits on a pole");
  }
  cplx scale = 1.0 / std::sqrt(2.0 * kPi * m.C_plus * m.C_minus);
  if (reference_scale && std::abs(-scale - *reference_scale) < std::abs(scale - *reference_scale)) {
    scale = -scale;
  }
  for (auto& v : in.u) v *= scale;
  for (auto& v : in.u_probe) v *= scale;
  s.u_interior = std::move(in.u);
  s.u_probe = std::move(in.u_probe);
  s.u_R = in.u_R * scale;
  s.du_R = in.du_R * scale;
  s.C_plus = m.C_plus * scale;
  s.C_minus = m.C_minus * scale;
  s.scale = scale;
  return s;
}

cplx pole_mismatch(cplx k, const PotentialParams& p, const PartialWave& pw, double R) {
  const RegularSolution sol = integrate_regular(k, p, pw, R);
  const CoulombParams cp{pw.ell, sommerfeld(k, p.Z_c, p)};
  const CoulombValue h = coulomb_H(Sign::plus, cp, k * R);
  return sol.du_R / (k * sol.u_R) - h.derivative / h.value;
}

std::vector<ScanRegion> default_scan_regions() {
  return {ScanRegion{{0.05, -0.2}, {1.0, 0.0}}, ScanRegion{{-0.05, 0.02}, {0.05, 1.6}}};
}

namespace {

// (u'/k) H+ - u H+' with the Coulomb phase removed from H+. This is an
// analytic function of k whose zeros are the poles.
cplx pole_function(cplx k, const PotentialParams& p, const PartialWave& pw, double R) {
  const RegularSolution sol = integrate_regular(k, p, pw, R);
  const CoulombParams cp{pw.ell, sommerfeld(k, p.Z_c, p)};
  const CoulombValue h = coulomb_H(Sign::plus, cp, k * R);
  const cplx unphase = std::exp(-kI * coulomb_phase(cp.ell, cp.eta));
  return (sol.du_R / k * h.value - sol.u_R * h.derivative) * unphase;
}

// Argument-principle pole locator.
class PoleScanner {
 public:
  PoleScanner(const PotentialParams& p, const PartialWave& pw, double R)
      : p_(p), pw_(pw), R_(R) {}

  void scan(cplx ll, cplx ur, int depth, std::vector<cplx>& seeds) {
    const int n = winding(ll, ur);
    if (n <= 0) return;
    const double width = ur.real() - ll.real();
    const double height = ur.imag() - ll.imag();
    if ((n == 1 && std::max(width, height) < 0.05) || depth > 12) {
      seeds.push_back(0.5 * (ll + ur));
      return;
    }
    if (width >= height) {
      const double xm = 0.5 * (ll.real() + ur.real());
      scan(ll, {xm, ur.imag()}, depth + 1, seeds);
      scan({xm, ll.imag()}, ur, depth + 1, seeds);
    } else {
      const double ym = 0.5 * (ll.imag() + ur.imag());
      scan(ll, {ur.real(), ym}, depth + 1, seeds);
      scan({ll.real(), ym}, ur, depth + 1, seeds);
    }
  }

 private:
  cplx value(cplx k) {
    const auto key = std::make_pair(k.real(), k.imag());
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const cplx f = pole_function(k, p_, pw_, R_);
    cache_.emplace(key, f);
    return f;
  }

  double phase_change(cplx a, cplx b, cplx fa, cplx fb, int depth) {
    const double d = std::arg(fb / fa);
    if (std::abs(d) <= 0.25 * kPi || depth > 14) return d;
    const cplx m = 0.5 * (a + b);
    const cplx fm = value(m);
    return phase_change(a, m, fa, fm, depth + 1) + phase_change(m, b, fm, fb, depth + 1);
  }

  int winding(cplx ll, cplx ur) {
    const cplx corners[4] = {ll, {ur.real(), ll.imag()}, ur, {ll.real(), ur.imag()}};
    double total = 0.0;
    for (int c = 0; c < 4; ++c) {
      const cplx a = corners[c];
      const cplx b = corners[(c + 1) % 4];
      // The background phase of e^{ikR} must be sampled finely enough that
      // no step wraps around.
      const int pieces = std::max(4, static_cast<int>(std::ceil(std::abs(b - a) * R_ / 0.3)));
      for (int j = 0; j < pieces; ++j) {
        const cplx x0 = a + (b - a) * (double(j) / pieces);
        const cplx x1 = a + (b - a) * (double(j + 1) / pieces);
        total += phase_change(x0, x1, value(x0), value(x1), 0);
      }
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
  }

  const PotentialParams& p_;
  const PartialWave& pw_;
  double R_;
  std::map<std::pair<double, double>, cplx> cache_;
};

// Outward integration cannot hold a bound state to the exactly decaying
// solution: H-(kR) exceeds H+(kR) by many orders of magnitude, so the last
// bits of k leave a visible growing admixture near R. Beyond the node
// closest below R_0 the tail is therefore integrated inwards from the
// outgoing boundary values and joined to the outward solution there.
void replace_bound_tail(BerggrenState& s, const PotentialParams& p, const RadialGrid& grid) {
  std::size_t m = 0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    if (grid.nodes[i] <= p.R_0) m = i;
  }
  const double r_m = grid.nodes[m];
  if (s.u_interior[m] == 0.0) return;

  struct Target {
    double r;
    cplx* slot;
  };
  std::vector<Target> targets;
  for (std::size_t i = m; i < grid.nodes.size(); ++i) targets.push_back({grid.nodes[i], &s.u_interior[i]});
  for (std::size_t i = 0; i < grid.probe.size(); ++i) {
    if (grid.probe[i] > r_m) targets.push_back({grid.probe[i], &s.u_probe[i]});
  }
  std::stable_sort(targets.begin(), targets.end(),
                   [](const Target& a, const Target& b) { return a.r > b.r; });

  const int l = s.pw.ell;
  const RadialCoefficient q{&p, &s.pw, grid.R, s.k * s.k, 2.0 * s.eta * s.k, double(l) * (l + 1)};
  const CoulombValue h = coulomb_H(Sign::plus, s.coulomb(), s.k * grid.R);
  detail::OdeState y{h.value, s.k * h.derivative};
  auto prop = detail::make_propagator(cplx{0.0, 0.0}, cplx{1.0, 0.0}, q);
  double t = grid.R;
  std::vector<cplx> inward(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    prop.advance(y, t, targets[i].r);
    inward[i] = y[0];
  }
  // The joining node r_m is the last target.
  const cplx f = s.u_interior[m] / inward.back();
  for (std::size_t i = 0; i < targets.size(); ++i) *targets[i].slot = f * inward[i];
  s.u_R = f * h.value;
  s.du_R = f * s.k * h.derivative;
  s.C_plus = f;
}

}  // namespace

std::vector<cplx> scan_poles(const PotentialParams& p, const PartialWave& pw, double R,
                             const std::vector<ScanRegion>& regions) {
  PoleScanner scanner(p, pw, R);
  std::vector<cplx> seeds;
  // Large contours pick up phase errors where |eta| is big, so each region
  // is tiled first and the argument principle is applied per tile.
  constexpr double kTile = 0.1;
  for (const auto& region : regions) {
    const cplx ll = region.lower_left;
    const cplx ur = region.upper_right;
    const int nx = std::max(1, static_cast<int>(std::ceil((ur.real() - ll.real()) / kTile - 1e-9)));
    const int ny = std::max(1, static_cast<int>(std::ceil((ur.imag() - ll.imag()) / kTile - 1e-9)));
    const double dx = (ur.real() - ll.real()) / nx;
    const double dy = (ur.imag() - ll.imag()) / ny;
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const cplx a{ll.real() + i * dx, ll.imag() + j * dy};
        scanner.scan(a, a + cplx{dx, dy}, 0, seeds);
      }
    }
  }
  return seeds;
}

BerggrenState find_pole(cplx k_guess, const PotentialParams& p, const PartialWave& pw,
                        const RadialGrid& grid) {
  if (!(k_guess.imag() > 0.0 && std::abs(k_guess.real()) < std::abs(k_guess.imag())) &&
      !(k_guess.real() > 0.0 && k_guess.imag() <= 0.0)) {
    throw DomainError("find_pole: seed must lie in the fourth quadrant or near the positive "
                      "imaginary axis");
  }
  const bool on_axis = k_guess.imag() > 0.0 && std::abs(k_guess.real()) < std::abs(k_guess.imag());
  // Bound states are searched for along the imaginary axis.
  cplx k0 = on_axis ? cplx{0.0, k_guess.imag()} : k_guess;
  cplx k1 = k0 * (1.0 + 1e-4);
  cplx g0 = pole_function(k0, p, pw, grid.R);
  cplx g1 = pole_function(k1, p, pw, grid.R);
  std::ostringstream trace;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    if (g1 == g0) break;
    cplx k2 = k1 - g1 * (k1 - k0) / (g1 - g0);
    if (on_axis) k2 = {0.0, k2.imag()};
    trace << " " << format_k(k2);
    const double step = std::abs(k2 - k1);
    k0 = k1;
    g0 = g1;
    k1 = k2;
    if (step < 1e-11) {
      converged = true;
      break;
    }
    g1 = pole_function(k1, p, pw, grid.R);
  }
  if (!converged) {
    throw SearchFailure("find_pole: no convergence from seed " + format_k(k_guess) +
                        "; iterates:" + trace.str());
  }
  const cplx k = k1;
  const cplx e_guess = p.hbar2_over_2m * k_guess * k_guess;
  const cplx e = p.hbar2_over_2m * k * k;
  if (std::abs(e - e_guess) > 0.5 * std::abs(e_guess)) {
    throw WrongPoleError("find_pole: seed " + format_k(k_guess) + " converged to distant pole " +
                         format_k(k));
  }

  BerggrenState s;
  s.kind = on_axis ? StateKind::bound : classify_pole(k);
  s.pw = pw;
  s.k = k;
  s.e = e;
  s.eta = sommerfeld(k, p.Z_c, p);
  s.R = grid.R;
  InteriorSolution in = integrate_interior(k, p, pw, grid);
  const MatchingCoefficients m = match(k, s.eta, pw.ell, grid.R, in.u_R, in.du_R);
  s.u_interior = std::move(in.u);
  s.u_probe = std::move(in.u_probe);
  s.u_R = in.u_R;
  s.du_R = in.du_R;
  s.C_plus = m.C_plus;
  s.C_minus = 0.0;
  s.scale = 1.0;
  if (s.kind == StateKind::bound) replace_bound_tail(s, p, grid);
  return normalize_discrete(std::move(s), grid);
}

std::vector<cplx> sample_beyond(const BerggrenState& state, std::span<const double> radii) {
  if (!std::is_sorted(radii.begin(), radii.end()) || (!radii.empty() && radii.front() < state.R)) {
    throw DomainError("sample_beyond: radii must be sorted and not below R");
  }
  std::vector<double> ts(radii.begin(), radii.end());
  for (double& t : ts) t -= state.R;
  return continue_exterior(state, 1.0, ts).u;
}

PathSamples continue_exterior(const BerggrenState& state, cplx direction,
                              std::span<const double> ts) {
  PathSamples out{std::vector<cplx>(ts.size(), 0.0), std::vector<cplx>(ts.size(), 0.0)};
  if (state.negligible || ts.empty()) return out;
  if (!std::is_sorted(ts.begin(), ts.end()) || ts.front() < 0.0) {
    throw DomainError("continue_exterior: path parameters must be sorted and non-negative");
  }
  const CoulombParams cp = state.coulomb();
  if (state.C_minus == 0.0) {
    // Propagating a decaying bound state outward would amplify the growing
    // solution, so H+ is evaluated directly.
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const CoulombValue h = coulomb_H(Sign::plus, cp, state.k * (state.R + ts[i] * direction));
      out.u[i] = state.C_plus * h.value;
      out.du[i] = state.k * state.C_plus * h.derivative;
    }
    return out;
  }
  const double ll = double(cp.ell) * (cp.ell + 1);
  const cplx coulomb = 2.0 * state.eta * state.k;
  const cplx k2 = state.k * state.k;
  auto q = [=](cplx s) { return ll / (s * s) + coulomb / s - k2; };
  auto prop = detail::make_propagator(cplx{state.R, 0.0}, direction, q);
  detail::OdeState y{state.u_R, state.du_R};
  double t = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    prop.advance(y, t, ts[i]);
    out.u[i] = y[0];
    out.du[i] = y[1];
  }
  return out;
}

}  // namespace berggren

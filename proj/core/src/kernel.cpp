#include "berggren/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>

#include "berggren/errors.hpp"

namespace berggren {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

const RayLayout& kernel_layout() {
  static const RayLayout layout = RayLayout::make();
  return layout;
}

// Sine state sqrt(2/pi) sin(k r).
cplx sine_state(cplx k, cplx r) { return std::sqrt(2.0 / kPi) * std::sin(k * r); }

// Gauss-Legendre nodes on [a, b] in panels of about `panel` fm.
GaussLegendreRule panel_rule(double a, double b, double panel, int nodes) {
  GaussLegendreRule out;
  if (b <= a) return out;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel - 1e-9)));
  for (int p = 0; p < panels; ++p) {
    const auto r = gauss_legendre(nodes, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels);
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  }
  return out;
}

// Largest |C^w H^w(kR)| / |u(R)|. Below the Coulomb barrier both components
// exceed u by this factor and cancel in u, so products split at R lose about
// log10 of the product of two such factors in digits.
double split_amplification(const BerggrenState& s) {
  if (s.discrete() || s.negligible) return 1.0;
  const CoulombParams cp = s.coulomb();
  const double hp = std::abs(s.C_plus * coulomb_H(Sign::plus, cp, s.k * s.R).value);
  const double hm = std::abs(s.C_minus * coulomb_H(Sign::minus, cp, s.k * s.R).value);
  return std::max(1.0, std::max(hp, hm) / std::abs(s.u_R));
}

// Classical turning radius of the exterior Coulomb-plus-centrifugal barrier.
double turning_radius(const BerggrenState& s) {
  if (s.discrete() || s.negligible || s.eta.real() <= 0.0) return 0.0;
  const double eta = std::abs(s.eta);
  const double ll = s.pw.ell * (s.pw.ell + 1.0);
  return (eta + std::sqrt(eta * eta + ll)) / std::abs(s.k);
}

// Exponential growth rate of the full solution along direction `dir`.
double growth_rate(const BerggrenState& s, cplx dir) {
  const double im = (s.k * dir).imag();
  double g = -im;  // |H+(kz)| ~ exp(-Im kz)
  if (s.C_minus != 0.0) g = std::max(g, im);
  return std::max(g, 0.0);
}

// Legs for sub-barrier pairs: straight paths z = R + t e^{i phi} ending at
// |z| = R * kLegRadiusStep^level, where both states are split into their
// outgoing and incoming parts.
constexpr int kLegDirections = 9;  // phi = j pi / 32, j = 0..8
constexpr double kLegRadiusStep = 1.1;
constexpr double kSplitLoss = 100.0;  // tolerated cancellation factor at R

struct LegKey {
  int phi = 0;
  int level = 0;
  auto operator<=>(const LegKey&) const = default;
};

double leg_angle(int j) { return j * kPi / 32.0; }

// Path length from R along e^{i phi} to the circle of radius `radius`.
double leg_length(double R, double phi, double radius) {
  const double sn = std::sin(phi);
  return -R * std::cos(phi) + std::sqrt(radius * radius - R * R * sn * sn);
}

// A state continued along one leg and its rays from the end of the leg.
struct LegSamples {
  std::vector<cplx> u;
  std::unique_ptr<StateRays> rays;
};

// Per-state data shared by all matrix elements of one assembly: the state
// seen from the policy radius, its samples between the grid radius and the
// policy radius, its cached ray residuals and, for sub-barrier pairs, its
// continuation along legs.
struct Entry {
  BerggrenState state;
  std::vector<cplx> between;
  std::unique_ptr<StateRays> rays;
  double amplification = 1.0;
  double turning = 0.0;
  std::map<LegKey, LegSamples> legs;
};

class Workspace {
 public:
  Workspace(const RadialGrid& grid, const ResidualCoulomb& v, const RotationPolicy& policy)
      : grid_(grid), v_(v), policy_(policy) {
    if (policy.R < grid.R - 1e-12) {
      throw ConfigurationError("rotation radius below the interior grid radius");
    }
    between_rule_ = panel_rule(grid.R, policy.R, 2.0, 24);
    v_grid_.reserve(grid.nodes.size());
    for (double r : grid.nodes) v_grid_.push_back(v(r));
    for (double r : between_rule_.nodes) v_between_.push_back(v(r));
  }

  int add(const BerggrenState& s) {
    if (s.u_interior.size() != grid_.nodes.size()) {
      throw DomainError("state samples do not match the interior grid");
    }
    auto e = std::make_unique<Entry>();
    e->state = policy_.R > grid_.R ? rebase(s, policy_.R) : s;
    e->between = sample_beyond(s, between_rule_.nodes);
    e->rays = std::make_unique<StateRays>(e->state, kernel_layout());
    e->amplification = split_amplification(e->state);
    e->turning = turning_radius(e->state);
    entries_.push_back(std::move(e));
    return static_cast<int>(entries_.size()) - 1;
  }

  const BerggrenState& state(int i) const { return entries_[i]->state; }
  const Entry& entry(int i) const { return *entries_[i]; }
  StateRays& rays(int i) { return *entries_[i]->rays; }
  const RotationPolicy& policy() const { return policy_; }
  const RadialGrid& grid() const { return grid_; }
  const ResidualCoulomb& potential() const { return v_; }
  const GaussLegendreRule& between_rule() const { return between_rule_; }

  // Unweighted <u_a|V_c|u_b> on [0, policy.R].
  cplx interior(int a, int b) const {
    const Entry& ea = *entries_[a];
    const Entry& eb = *entries_[b];
    cplx sum = 0.0;
    for (std::size_t j = 0; j < grid_.nodes.size(); ++j) {
      sum += grid_.weights[j] * v_grid_[j] * ea.state.u_interior[j] * eb.state.u_interior[j];
    }
    for (std::size_t j = 0; j < between_rule_.nodes.size(); ++j) {
      sum += between_rule_.weights[j] * v_between_[j] * ea.between[j] * eb.between[j];
    }
    return sum;
  }

  // Unweighted exterior part beyond policy.R.
  cplx exterior(int a, int b) {
    if (v_.delta_Z == 0.0) return 0.0;
    if (const auto leg = plan_leg(a, b)) return v_.strength() * exterior_via_leg(a, b, *leg);
    cplx sum = 0.0;
    for (Sign wa : {Sign::plus, Sign::minus}) {
      for (Sign wb : {Sign::plus, Sign::minus}) {
        sum += ray_pair_integral(rays(a), wa, rays(b), wb, policy_, kernel_layout(), 1);
      }
    }
    return v_.strength() * sum;
  }

  cplx unweighted(int a, int b) { return interior(a, b) + exterior(a, b); }

  // Leg for the pair (a, b), or nothing when splitting at R loses fewer
  // than log10(kSplitLoss) digits or a leg would not do better.
  std::optional<LegKey> plan_leg(int a, int b) const {
    const Entry& ea = *entries_[a];
    const Entry& eb = *entries_[b];
    if (ea.state.negligible || eb.state.negligible) return std::nullopt;
    const double loss = ea.amplification * eb.amplification;
    if (loss <= kSplitLoss) return std::nullopt;
    double radius = 0.0;
    for (const Entry* e : {&ea, &eb}) {
      if (e->amplification > std::sqrt(kSplitLoss) / 2.0) radius = std::max(radius, 1.2 * e->turning);
    }
    const double R = policy_.R;
    if (radius <= R) return std::nullopt;
    LegKey key;
    key.level = static_cast<int>(std::ceil(std::log(radius / R) / std::log(kLegRadiusStep) - 1e-12));
    const double end = R * std::pow(kLegRadiusStep, key.level);
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kLegDirections; ++j) {
      const cplx dir = std::polar(1.0, leg_angle(j));
      const double cost = (growth_rate(ea.state, dir) + growth_rate(eb.state, dir)) *
                          leg_length(R, leg_angle(j), end);
      if (cost < best - 1e-12) {
        best = cost;
        key.phi = j;
      }
    }
    // Growth along the leg costs digits in the same way as the cancellation.
    if (best >= std::log(loss) - std::log(10.0)) return std::nullopt;
    return key;
  }

  const GaussLegendreRule& leg_rule(const LegKey& key) {
    auto it = leg_rules_.find(key);
    if (it == leg_rules_.end()) {
      const double end = policy_.R * std::pow(kLegRadiusStep, key.level);
      it = leg_rules_.emplace(key, panel_rule(0.0, leg_length(policy_.R, leg_angle(key.phi), end),
                                              2.0, 24)).first;
    }
    return it->second;
  }

  LegSamples& leg(int i, const LegKey& key) {
    Entry& e = *entries_[i];
    auto it = e.legs.find(key);
    if (it == e.legs.end()) {
      const GaussLegendreRule& rule = leg_rule(key);
      const cplx dir = std::polar(1.0, leg_angle(key.phi));
      const double length = leg_length(policy_.R, leg_angle(key.phi),
                                       policy_.R * std::pow(kLegRadiusStep, key.level));
      LegSamples samples;
      samples.u = continue_exterior(e.state, dir, rule.nodes).u;
      samples.rays = std::make_unique<StateRays>(e.state, kernel_layout(), policy_.R + length * dir);
      it = e.legs.emplace(key, std::move(samples)).first;
    }
    return it->second;
  }

  // Exterior integral (without the strength C_c dZ) of the full solutions
  // along the leg, plus the four split products on rays from its end.
  cplx exterior_via_leg(int a, int b, const LegKey& key) {
    const GaussLegendreRule& rule = leg_rule(key);
    LegSamples& la = leg(a, key);
    LegSamples& lb = leg(b, key);
    const cplx dir = std::polar(1.0, leg_angle(key.phi));
    cplx sum = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      sum += rule.weights[j] * la.u[j] * lb.u[j] / (policy_.R + rule.nodes[j] * dir);
    }
    sum *= dir;
    for (Sign wa : {Sign::plus, Sign::minus}) {
      for (Sign wb : {Sign::plus, Sign::minus}) {
        sum += ray_pair_integral(*la.rays, wa, *lb.rays, wb, policy_, kernel_layout(), 1);
      }
    }
    return sum;
  }

  cplx weighted(int a, int b) {
    return std::sqrt(state(a).w) * std::sqrt(state(b).w) * unweighted(a, b);
  }

 private:
  const RadialGrid& grid_;
  ResidualCoulomb v_;
  RotationPolicy policy_;
  GaussLegendreRule between_rule_;
  std::vector<double> v_grid_;
  std::vector<double> v_between_;
  std::vector<std::unique_ptr<Entry>> entries_;
  std::map<LegKey, GaussLegendreRule> leg_rules_;
};

// Integral along ray theta_index of f(j, z) dz, where j indexes the layout
// abscissae; `prepare(panels)` is called before panels are used so callers
// can extend residual caches. Stops after two quiet panels or when
// `stop(panel)` returns true at the end of a panel.
template <class Prepare, class F, class Stop>
cplx walk_ray(cplx origin, double theta, const RotationPolicy& policy, Prepare&& prepare, F&& f,
              Stop&& stop) {
  const RayLayout& layout = kernel_layout();
  const cplx dir = std::polar(1.0, theta);
  const int npp = layout.nodes_per_panel;
  cplx total = 0.0;
  int quiet = 0;
  int requested = 0;
  for (int p = 0; p < layout.panels(); ++p) {
    if (p >= requested) {
      requested = std::min(layout.panels(), std::max(2 * requested, 24));
      prepare(requested);
    }
    cplx panel = 0.0;
    for (int j = p * npp; j < (p + 1) * npp; ++j) {
      panel += f(j, origin + layout.x[j] * dir) * layout.wx[j];
    }
    panel *= dir;
    total += panel;
    if (stop(p)) return total;
    if (std::abs(panel) <= policy.panel_threshold * std::abs(total)) {
      if (++quiet >= 2) return total;
    } else {
      quiet = 0;
    }
  }
  throw AccuracyError("ray integral did not converge within the ray layout");
}

// Coefficients d_n, n >= 1, of S+(x) S-(x) - 1 = sum d_n x^{-n}, with S the
// asymptotic series of H+ and H-. Summed at x directly.
cplx tail_of_product(const CoulombParams& p, cplx x) {
  // t_n for omega = +1 and -1.
  constexpr int kMax = 60;
  std::array<std::array<cplx, kMax + 1>, 2> t{};
  for (int s = 0; s < 2; ++s) {
    const double w = s == 0 ? 1.0 : -1.0;
    const cplx a = 1.0 + p.ell + kI * w * p.eta;
    const cplx b = -static_cast<double>(p.ell) + kI * w * p.eta;
    t[s][0] = 1.0;
    for (int n = 1; n <= kMax; ++n) {
      t[s][n] = t[s][n - 1] * (a + double(n - 1)) * (b + double(n - 1)) / (double(n) * 2.0 * kI * w);
    }
  }
  // Integral from x to infinity of x'^{-n-1} dx' is x^{-n} / n. Single
  // coefficients can vanish by cancellation, so two small terms in a row
  // are required; |x| is far below the divergence onset n ~ 2|x|.
  cplx sum = 0.0;
  cplx xn = 1.0;
  int small = 0;
  for (int n = 1; n <= kMax; ++n) {
    xn /= x;
    cplx d = 0.0;
    for (int m = 0; m <= n; ++m) d += t[0][m] * t[1][n - m];
    const cplx term = d * xn / double(n);
    sum += term;
    // Absolute test: the series is a small correction to terms of order one.
    small = std::abs(term) < 1e-18 ? small + 1 : 0;
    if (small >= 2) return sum;
  }
  std::ostringstream os;
  os << "asymptotic tail of H+ H- did not converge (l = " << p.ell << ", eta = " << p.eta
     << ", kz = " << x << ")";
  throw AccuracyError(os.str());
}

// w * (regularized integral) evaluated with a prepared workspace entry.
cplx regularized_diagonal(Workspace& ws, int i) {
  const Entry& e = ws.entry(i);
  const BerggrenState& s = e.state;
  if (s.discrete()) throw DomainError("regularized diagonal requested for a pole state");
  if (s.negligible) {
    throw NormalizationInconsistency("negligible scattering state on the subtraction diagonal");
  }
  const double C = ws.potential().strength();
  const cplx k = s.k;
  const cplx norm = 2.0 * kPi * s.C_plus * s.C_minus;
  if (std::abs(norm - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "2 pi C+ C- = " << norm << " for k = " << k
       << "; the phase-free group would decay as 1/z";
    throw NormalizationInconsistency(os.str());
  }
  if (C == 0.0) return 0.0;

  // Interior: u^2 V_c - s_k^2 C / r.
  const RadialGrid& grid = ws.grid();
  cplx interior = 0.0;
  for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
    const double r = grid.nodes[j];
    const cplx sk = sine_state(k, r);
    interior += grid.weights[j] *
                (ws.potential()(r) * s.u_interior[j] * s.u_interior[j] - sk * sk * C / r);
  }
  const GaussLegendreRule& between = ws.between_rule();
  for (std::size_t j = 0; j < between.nodes.size(); ++j) {
    const double r = between.nodes[j];
    const cplx sk = sine_state(k, r);
    interior += between.weights[j] * (C / r) * (e.between[j] * e.between[j] - sk * sk);
  }

  const RotationPolicy& policy = ws.policy();
  cplx exterior = 0.0;
  StateRays* rays_ptr = &ws.rays(i);
  if (const auto leg = ws.plan_leg(i, i)) {
    // Below the barrier u^2 - s_k^2 is integrated whole out to the end of
    // the leg, and the groups below start from there.
    const GaussLegendreRule& rule = ws.leg_rule(*leg);
    LegSamples& samples = ws.leg(i, *leg);
    const cplx dir = std::polar(1.0, leg_angle(leg->phi));
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const cplx z = s.R + rule.nodes[j] * dir;
      const cplx sk = sine_state(k, z);
      exterior += rule.weights[j] * (samples.u[j] * samples.u[j] - sk * sk) / z;
    }
    exterior *= dir;
    rays_ptr = samples.rays.get();
  }
  StateRays& rays = *rays_ptr;
  const cplx origin = rays.origin();

  // exp(+/- 2ikz) groups: (C^w H^w)^2 + exp(2 i w k z) / (2 pi), over z.
  cplx oscillating = 0.0;
  for (Sign w : {Sign::plus, Sign::minus}) {
    const double wd = to_int(w);
    const int ti = select_theta(s, w, s, w, policy);
    std::span<const cplx> res;
    oscillating += walk_ray(
        origin, policy.allowed_thetas[ti], policy,
        [&](int panels) { res = rays.residuals(w, ti, panels, policy); },
        [&](int j, cplx z) {
          const cplx ph = std::exp(2.0 * kI * wd * k * z);
          return ph * (std::exp(2.0 * res[j]) + 1.0 / (2.0 * kPi)) / z;
        },
        [](int) { return false; });
  }

  // Phase-free group 2 C+H+ C-H- - 1/pi, which is O(1/z^2). It is integrated
  // numerically until the asymptotic series of H+ H- takes over.
  int t0 = -1;
  for (int ti : {2, 1, 3, 0}) {
    if (ray_admissible(s, policy.allowed_thetas[ti])) {
      t0 = ti;
      break;
    }
  }
  if (t0 < 0) throw SingularPairError("no admissible ray for the phase-free diagonal group");
  const double theta0 = policy.allowed_thetas[t0];
  const CoulombParams cp = s.coulomb();
  const double ll = double(cp.ell) * (cp.ell + 1);
  const double x_switch =
      std::max(200.0, 20.0 * (std::norm(cp.eta) + ll + 1.0)) / std::abs(k);
  const RayLayout& layout = kernel_layout();
  std::span<const cplx> rp, rm;
  int last_panel = -1;
  cplx phase_free = walk_ray(
      origin, theta0, policy,
      [&](int panels) {
        rp = rays.residuals(Sign::plus, t0, panels, policy);
        rm = rays.residuals(Sign::minus, t0, panels, policy);
      },
      [&](int j, cplx z) { return (2.0 * std::exp(rp[j] + rm[j]) - 1.0 / kPi) / z; },
      [&](int p) {
        last_panel = p;
        return layout.edges[p + 1] >= x_switch;
      });
  if (layout.edges[last_panel + 1] < x_switch) {
    throw NormalizationInconsistency("phase-free diagonal group did not reach its asymptotic tail");
  }
  const cplx z_end = origin + layout.edges[last_panel + 1] * std::polar(1.0, theta0);
  // 2 C+ C- = 1/pi, so the remaining integral is (1/pi) int (S+ S- - 1)/z.
  phase_free += tail_of_product(cp, k * z_end) / kPi;

  exterior = C * (exterior + oscillating + phase_free);
  return s.w * (interior + exterior);
}

KernelMatrix empty_kernel(const DiscretizedBasis& basis, const ResidualCoulomb& v, Scheme scheme) {
  KernelMatrix m;
  m.n = basis.size();
  m.elements = Eigen::MatrixXcd::Zero(m.n, m.n);
  m.delta_Zc = v.delta_Z;
  m.scheme = scheme;
  for (const auto& s : basis.states) m.basis_energies.push_back(s.e);
  return m;
}

RotationPolicy effective_policy(const DiscretizedBasis& basis, const KernelOptions& options) {
  RotationPolicy policy = options.policy;
  if (policy.R < basis.grid.R) policy.R = basis.grid.R;
  policy.validate(basis.potential);
  return policy;
}

// Fills every element except the scattering diagonal with matel values.
void fill_off_diagonal(KernelMatrix& m, Workspace& ws, const DiscretizedBasis& basis) {
  for (int i = 0; i < m.n; ++i) {
    for (int j = i; j < m.n; ++j) {
      if (i == j && !basis.states[i].discrete()) continue;
      const cplx value = ws.weighted(i, j);
      m.elements(i, j) = value;
      m.elements(j, i) = value;
    }
  }
}

}  // namespace

ResidualCoulomb ResidualCoulomb::between(const PotentialParams& basis_potential, double Z_diag) {
  return {Z_diag - basis_potential.Z_c, basis_potential.C_c, basis_potential.alpha};
}

double ResidualCoulomb::operator()(double r) const {
  if (delta_Z == 0.0) return 0.0;
  const double ar = alpha * r;
  if (ar < 1e-8) return strength() * 2.0 * alpha / std::sqrt(kPi);
  return strength() * std::erf(ar) / r;
}

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::cut:
      return "cut";
    case Scheme::subtraction:
      return "sub";
    case Scheme::offdiag:
      return "offdiag";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view s) {
  if (s == "cut") return Scheme::cut;
  if (s == "sub" || s == "subtraction") return Scheme::subtraction;
  if (s == "offdiag" || s == "off-diagonal") return Scheme::offdiag;
  throw ConfigurationError("unknown scheme '" + std::string(s) + "'");
}

double KernelMatrix::asymmetry() const {
  const double big = elements.cwiseAbs().maxCoeff();
  if (n == 0 || big == 0.0) return 0.0;
  return (elements - elements.transpose()).cwiseAbs().maxCoeff() / big;
}

BerggrenState rebase(const BerggrenState& s, double R_new) {
  if (R_new < s.R) throw DomainError("rebase: the matching radius can only grow");
  BerggrenState out = s;
  out.R = R_new;
  if (s.negligible || R_new == s.R) return out;
  // Continued without splitting, which would cancel digits below the barrier.
  const double t[1] = {R_new - s.R};
  const PathSamples p = continue_exterior(s, 1.0, t);
  out.u_R = p.u[0];
  out.du_R = p.du[0];
  return out;
}

cplx matel(const BerggrenState& a, const BerggrenState& b, const RadialGrid& grid,
           const ResidualCoulomb& v, const RotationPolicy& policy) {
  if (!a.discrete() && !b.discrete() && a.k == b.k) {
    throw SingularPairError("matel: scattering state paired with itself");
  }
  Workspace ws(grid, v, policy);
  const int ia = ws.add(a);
  const int ib = ws.add(b);
  return ws.weighted(ia, ib);
}

cplx analytic_sine_integral(cplx k, double k_max, double strength) {
  if (k == 0.0) return 0.0;
  if (std::abs(k - k_max) == 0.0) {
    throw DomainError("analytic_sine_integral: k equals k_max (logarithmic singularity)");
  }
  const cplx kp = k_max + k;
  const cplx km = k_max - k;
  return strength / kPi * (kp * std::log(kp) - km * std::log(km) - 2.0 * k * std::log(k));
}

cplx regularized_diagonal_integral(const BerggrenState& s, const RadialGrid& grid,
                                   const ResidualCoulomb& v, const RotationPolicy& policy) {
  Workspace ws(grid, v, policy);
  return regularized_diagonal(ws, ws.add(s));
}

double default_cut_radius(const PartialWave& pw) {
  return pw.ell == 2 && pw.two_j == 3 ? 35.0 : 75.0;
}

KernelMatrix assemble_cut(const DiscretizedBasis& basis, const ResidualCoulomb& v,
                          const KernelOptions& options) {
  const double R = basis.grid.R;
  if (options.R_cut < R) throw ConfigurationError("cut radius below the interior grid radius");
  KernelMatrix m = empty_kernel(basis, v, Scheme::cut);
  if (v.delta_Z == 0.0) return m;
  const GaussLegendreRule beyond =
      panel_rule(R, options.R_cut, options.cut_panel, options.cut_nodes_per_panel);
  std::vector<std::vector<cplx>> outer(m.n);
  for (int i = 0; i < m.n; ++i) outer[i] = sample_beyond(basis.states[i], beyond.nodes);
  std::vector<double> v_grid, v_beyond;
  for (double r : basis.grid.nodes) v_grid.push_back(v(r));
  for (double r : beyond.nodes) v_beyond.push_back(v(r));
  for (int i = 0; i < m.n; ++i) {
    const BerggrenState& a = basis.states[i];
    for (int j = i; j < m.n; ++j) {
      const BerggrenState& b = basis.states[j];
      cplx sum = 0.0;
      for (std::size_t q = 0; q < v_grid.size(); ++q) {
        sum += basis.grid.weights[q] * v_grid[q] * a.u_interior[q] * b.u_interior[q];
      }
      for (std::size_t q = 0; q < v_beyond.size(); ++q) {
        sum += beyond.weights[q] * v_beyond[q] * outer[i][q] * outer[j][q];
      }
      const cplx value = std::sqrt(a.w) * std::sqrt(b.w) * sum;
      m.elements(i, j) = value;
      m.elements(j, i) = value;
    }
  }
  return m;
}

KernelMatrix assemble_subtraction(const DiscretizedBasis& basis, const ResidualCoulomb& v,
                                  const KernelOptions& options) {
  KernelMatrix m = empty_kernel(basis, v, Scheme::subtraction);
  if (v.delta_Z == 0.0) return m;
  Workspace ws(basis.grid, v, effective_policy(basis, options));
  for (const auto& s : basis.states) ws.add(s);
  fill_off_diagonal(m, ws, basis);

  const double k_max = basis.contour.k_max().real();
  const double C = v.strength();
  for (int i = basis.n_res; i < m.n; ++i) {
    const cplx ki = basis.states[i].k;
    if (std::abs(ki - k_max) < 1e-14 * k_max) {
      throw DomainError("subtraction: contour node coincides with k_max");
    }
    cplx logs = 0.0;
    for (int j = basis.n_res; j < m.n; ++j) {
      if (j == i) continue;
      const cplx kj = basis.states[j].k;
      // Differences are taken in contour order so they stay off the cut.
      const cplx diff = j < i ? ki - kj : kj - ki;
      if (diff.imag() == 0.0 && diff.real() <= 0.0) {
        throw DomainError("subtraction: logarithm argument on the branch cut");
      }
      logs += basis.states[j].w * (std::log(ki + kj) - std::log(diff));
    }
    m.elements(i, i) = regularized_diagonal(ws, i) + analytic_sine_integral(ki, k_max, C) -
                       C / kPi * logs;
  }
  return m;
}

KernelMatrix assemble_offdiag(const DiscretizedBasis& basis, const ResidualCoulomb& v,
                              const KernelOptions& options) {
  KernelMatrix m = empty_kernel(basis, v, Scheme::offdiag);
  if (v.delta_Z == 0.0) return m;
  const RotationPolicy policy = effective_policy(basis, options);
  Workspace ws(basis.grid, v, policy);
  for (const auto& s : basis.states) ws.add(s);
  fill_off_diagonal(m, ws, basis);

  for (int i = basis.n_res; i < m.n; ++i) {
    const BerggrenState& s = basis.states[i];
    const cplx shift = s.w / (4.0 * kPi);
    try {
      const BerggrenState up =
          make_scattering(s.k + shift, basis.potential, basis.pw, basis.grid, s.scale);
      const BerggrenState down =
          make_scattering(s.k - shift, basis.potential, basis.pw, basis.grid, s.scale);
      const int iu = ws.add(up);
      const int id = ws.add(down);
      m.elements(i, i) = s.w * ws.unweighted(iu, id);
    } catch (const Error& e) {
      throw Error("off-diagonal scheme, node " + std::to_string(i - basis.n_res) +
                  ": shifted state failed: " + e.what());
    }
  }
  return m;
}

KernelMatrix assemble(Scheme scheme, const DiscretizedBasis& basis, const ResidualCoulomb& v,
                      const KernelOptions& options) {
  switch (scheme) {
    case Scheme::cut:
      return assemble_cut(basis, v, options);
    case Scheme::subtraction:
      return assemble_subtraction(basis, v, options);
    case Scheme::offdiag:
      return assemble_offdiag(basis, v, options);
  }
  throw ConfigurationError("unknown scheme");
}

void write_matrix(const KernelMatrix& m, std::ostream& out) {
  const auto old = out.precision(17);
  out << "n " << m.n << " scheme " << to_string(m.scheme) << " delta_Zc " << m.delta_Zc << '\n';
  for (const cplx& e : m.basis_energies) out << e.real() << ' ' << e.imag() << '\n';
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      out << m.elements(i, j).real() << ' ' << m.elements(i, j).imag() << '\n';
    }
  }
  out.precision(old);
}

}  // namespace berggren

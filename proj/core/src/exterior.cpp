#include "berggren/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "berggren/errors.hpp"
#include "berggren/quadrature.hpp"
#include "ode.hpp"

namespace berggren {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

int omega_slot(Sign omega) { return omega == Sign::plus ? 0 : 1; }

// Everything needed to follow one component of one state along one ray.
class RayComponent {
 public:
  RayComponent(const BerggrenState& s, Sign omega, double theta, cplx origin)
      : s_(s), omega_(omega), dir_(std::polar(1.0, theta)), z0_(origin), cp_(s.coulomb()) {
    coefficient_ = omega == Sign::plus ? s.C_plus : s.C_minus;
    if (std::abs(std::arg(origin)) >= 0.5 * kPi) {
      throw DomainError("ray origin must lie in the right half plane");
    }
    if (!s.discrete() && (std::abs(std::arg(s.k) + theta) >= kPi ||
                          std::abs(std::arg(s.k) + std::arg(origin)) >= kPi)) {
      throw ContourConfigurationError("rotated ray crosses the Coulomb cut for a non-discrete state");
    }
  }

  cplx z(double x) const { return z0_ + x * dir_; }

  // log(2 k z) with arg(z) followed continuously from the positive real axis.
  cplx log_2rho(double x) const {
    const cplx zz = z(x);
    return std::log(2.0 * std::abs(s_.k) * std::abs(zz)) +
           kI * (std::arg(s_.k) + std::arg(z0_) + std::arg(zz / z0_));
  }

  // Roots of |z0 + x e^{i theta}| = radius (0 when there are none beyond 0).
  double outer_x(double radius) const {
    const double b = (std::conj(z0_) * dir_).real();
    const double disc = b * b - std::norm(z0_) + radius * radius;
    if (disc <= 0.0) return 0.0;
    return std::max(0.0, -b + std::sqrt(disc));
  }

  double inner_x(double radius) const {
    const double b = (std::conj(z0_) * dir_).real();
    const double disc = b * b - std::norm(z0_) + radius * radius;
    if (disc <= 0.0) return 0.0;
    return std::max(0.0, -b - std::sqrt(disc));
  }

  std::vector<cplx> residuals(std::span<const double> xs) {
    std::vector<cplx> out(xs.size());
    if (s_.negligible || coefficient_ == 0.0) {
      std::fill(out.begin(), out.end(), cplx{-std::numeric_limits<double>::infinity(), 0.0});
      return out;
    }
    log_coefficient_ = std::log(coefficient_);
    const double k_abs = std::abs(s_.k);

    // Start of the region where the asymptotic expansion is used directly.
    double x_asym = outer_x(asymptotic_radius(cp_) / k_abs);
    while (!asymptotic_at(x_asym)) x_asym = 1.25 * x_asym + 1.0;

    // Coulomb barrier, where both components grow towards the origin.
    const double x_close = std::max(0.0, -(std::conj(z0_) * dir_).real());
    double x_b1 = 0.0;
    double x_b2 = 0.0;
    if (!s_.discrete() && s_.eta.real() > 0.0) {
      const double eta = std::abs(s_.eta);
      const double l2 = double(cp_.ell) * (cp_.ell + 1);
      const double radius = (eta + std::sqrt(eta * eta + l2) + 1.0) / k_abs;
      x_b2 = outer_x(radius);
      x_b1 = inner_x(radius);
      if (x_b2 <= 0.0 || x_b2 <= x_b1) x_b1 = x_b2 = 0.0;
    }
    x_asym = std::max(x_asym, x_b2);

    const bool outside_forward = -(double(to_int(omega_)) * s_.k * dir_).imag() > 0.0;
    std::vector<Segment> segs;
    auto push = [&](double a, double b, bool forward) {
      if (b <= a) return;
      if (!segs.empty() && segs.back().forward == forward) {
        segs.back().b = b;
      } else {
        segs.push_back({a, b, forward});
      }
    };
    if (x_b2 > 0.0) {
      push(0.0, x_b1, outside_forward);
      push(x_b1, std::max(x_close, x_b1), true);
      push(std::max(x_close, x_b1), x_b2, false);
      push(x_b2, x_asym, outside_forward);
    } else {
      push(0.0, x_asym, outside_forward);
    }

    for (std::size_t i = 0; i < segs.size(); ++i) {
      const Segment& sg = segs[i];
      if (sg.forward) {
        const Seed seed = sg.a == 0.0 ? matching_seed() : point_seed(sg.a);
        sweep(seed, sg.a, sg.b, xs, out);
      } else {
        const bool last = i + 1 == segs.size();
        const Seed seed = last ? asymptotic_seed(sg.b) : point_seed(sg.b);
        sweep(seed, sg.b, sg.a, xs, out);
      }
    }
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (xs[j] >= x_asym) out[j] = asymptotic_residual(xs[j]);
    }
    return out;
  }

 private:
  struct Segment {
    double a;
    double b;
    bool forward;
  };

  // Component in log form: u = exp(log_u), du/dz = dlog * u.
  struct Seed {
    cplx log_u;
    cplx dlog;
  };

  bool asymptotic_at(double x) const {
    return asymptotic_series(omega_, cp_, s_.k * z(x)).has_value();
  }

  cplx asymptotic_residual(double x) const {
    const cplx rho = s_.k * z(x);
    const auto series = asymptotic_series(omega_, cp_, rho);
    if (!series) {
      throw EvaluationFailure("exterior: asymptotic expansion failed along ray", cp_.ell, cp_.eta,
                              rho);
    }
    return log_coefficient_ + asymptotic_phase_remainder(omega_, cp_, log_2rho(x)) +
           std::log(1.0 + series->T);
  }

  Seed asymptotic_seed(double x) const {
    const cplx rho = s_.k * z(x);
    const auto series = asymptotic_series(omega_, cp_, rho);
    if (!series) {
      throw EvaluationFailure("exterior: asymptotic seed failed", cp_.ell, cp_.eta, rho);
    }
    const double w = to_int(omega_);
    const cplx S = 1.0 + series->T;
    const cplx log_u = log_coefficient_ + kI * w * rho +
                       asymptotic_phase_remainder(omega_, cp_, log_2rho(x)) + std::log(S);
    const cplx dlog_rho = kI * w * (1.0 - cp_.eta / rho) + series->dS / S;
    return {log_u, s_.k * dlog_rho};
  }

  Seed point_seed(double x) const {
    const CoulombValue h = coulomb_H(omega_, cp_, s_.k * z(x));
    return {log_coefficient_ + std::log(h.value), s_.k * h.derivative / h.value};
  }

  Seed matching_seed() const {
    if (s_.discrete() && z0_ == cplx{s_.R, 0.0}) return {std::log(s_.u_R), s_.du_R / s_.u_R};
    return point_seed(0.0);
  }

  // Propagates the seed from x_from to x_to and stores residual logs at the
  // abscissae of the half-open segment [min, max).
  void sweep(const Seed& seed, double x_from, double x_to, std::span<const double> xs,
             std::vector<cplx>& out) {
    const double lo = std::min(x_from, x_to);
    const double hi = std::max(x_from, x_to);
    const double w = to_int(omega_);
    const int ll = cp_.ell * (cp_.ell + 1);
    const cplx coulomb = 2.0 * cp_.eta * s_.k;
    const cplx k2 = s_.k * s_.k;
    auto q = [=](cplx zz) { return double(ll) / (zz * zz) + coulomb / zz - k2; };
    auto prop = detail::make_propagator(z0_, dir_, q);

    detail::OdeState y{1.0, seed.dlog};
    cplx offset = seed.log_u;
    double t = x_from;
    auto record = [&](std::size_t j) {
      out[j] = offset + std::log(y[0]) - kI * w * s_.k * z(xs[j]);
    };
    auto renormalize = [&]() {
      const double m = std::abs(y[0]);
      if (m > 1e100 || m < 1e-100) {
        offset += std::log(y[0]);
        y[1] /= y[0];
        y[0] = 1.0;
      }
    };
    auto in_range = [&](double xv) { return xv >= lo && xv < hi; };

    if (x_to >= x_from) {
      for (std::size_t j = 0; j < xs.size(); ++j) {
        if (!in_range(xs[j])) continue;
        prop.advance(y, t, xs[j]);
        renormalize();
        record(j);
      }
    } else {
      for (std::size_t jj = xs.size(); jj-- > 0;) {
        if (!in_range(xs[jj])) continue;
        prop.advance(y, t, xs[jj]);
        renormalize();
        record(jj);
      }
    }
  }

  const BerggrenState& s_;
  Sign omega_;
  cplx dir_;
  cplx z0_;
  CoulombParams cp_;
  cplx coefficient_;
  cplx log_coefficient_;
};

}  // namespace

void RotationPolicy::validate(const PotentialParams& p) const {
  if (!(R > 0.0)) throw ConfigurationError("rotation radius must be positive");
  if (std::erfc(p.alpha * R) > 1e-14) {
    throw ConfigurationError("rotation radius too small: erf(alpha R) differs from 1");
  }
  // The nuclear tail at R enters the matching only through the potential
  // mismatch V_o f(R); 1e-7 of the Fermi function keeps it below a keV-scale
  // effect while allowing the customary R = 15 fm.
  if (fermi(R, p) > 1e-7) {
    throw ConfigurationError("rotation radius too small: Woods-Saxon tail not negligible");
  }
}

int select_theta(cplx kappa, const RotationPolicy& policy) {
  int best = -1;
  double best_rate = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double rate = (kI * kappa * std::polar(1.0, policy.allowed_thetas[i])).real();
    if (best < 0 || rate < best_rate - 1e-14 * std::abs(kappa)) {
      best = i;
      best_rate = rate;
    }
  }
  if (!(best_rate < 0.0)) {
    std::ostringstream os;
    os << "no rotation angle gives a decaying integrand for kappa = " << kappa;
    throw SingularPairError(os.str());
  }
  return best;
}

bool ray_admissible(const BerggrenState& s, double theta) {
  return s.discrete() || std::abs(std::arg(s.k) + theta) < kPi;
}

int select_theta(const BerggrenState& a, Sign wa, const BerggrenState& b, Sign wb,
                 const RotationPolicy& policy) {
  const cplx kappa = double(to_int(wa)) * a.k + double(to_int(wb)) * b.k;
  auto margin = [&](double theta) {
    double m = kPi;
    for (const BerggrenState* s : {&a, &b}) {
      if (!s->discrete()) m = std::min(m, kPi - std::abs(std::arg(s->k) + theta));
    }
    return m;
  };
  int best = -1;
  double best_rate = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double theta = policy.allowed_thetas[i];
    if (!ray_admissible(a, theta) || !ray_admissible(b, theta)) continue;
    const double rate = (kI * kappa * std::polar(1.0, theta)).real();
    const double tol = 1e-12 * std::abs(kappa);
    if (best < 0 || rate < best_rate - tol ||
        (rate < best_rate + tol && margin(theta) > margin(policy.allowed_thetas[best]))) {
      best = i;
      best_rate = rate;
    }
  }
  if (best < 0 || !(best_rate < 0.0)) {
    std::ostringstream os;
    os << "no admissible rotation angle gives a decaying integrand for kappa = " << kappa;
    throw SingularPairError(os.str());
  }
  return best;
}

RayLayout RayLayout::make(double x_max, int nodes_per_panel) {
  RayLayout layout;
  layout.nodes_per_panel = nodes_per_panel;
  double x = 0.0;
  layout.edges.push_back(x);
  while (x < 40.0 - 1e-12) {
    x += 2.0;
    layout.edges.push_back(x);
  }
  double width = 20.0;
  while (x < x_max) {
    x += width;
    width *= 1.5;
    layout.edges.push_back(x);
  }
  for (int p = 0; p < layout.panels(); ++p) {
    const auto rule = gauss_legendre(nodes_per_panel, layout.edges[p], layout.edges[p + 1]);
    layout.x.insert(layout.x.end(), rule.nodes.begin(), rule.nodes.end());
    layout.wx.insert(layout.wx.end(), rule.weights.begin(), rule.weights.end());
  }
  return layout;
}

std::vector<cplx> component_residuals(const BerggrenState& s, Sign omega, double theta,
                                      std::span<const double> xs) {
  return component_residuals(s, omega, theta, xs, s.R);
}

std::vector<cplx> component_residuals(const BerggrenState& s, Sign omega, double theta,
                                      std::span<const double> xs, cplx origin) {
  RayComponent ray(s, omega, theta, origin);
  return ray.residuals(xs);
}

cplx exterior_component(const BerggrenState& s, Sign omega, double theta, double x) {
  if (x < 0.0) throw DomainError("exterior_component: x must be non-negative");
  const double xs[1] = {x};
  const cplx r = component_residuals(s, omega, theta, xs)[0];
  const cplx z = s.R + x * std::polar(1.0, theta);
  return std::exp(r + kI * double(to_int(omega)) * s.k * z);
}

StateRays::StateRays(const BerggrenState& s, const RayLayout& layout)
    : StateRays(s, layout, s.R) {}

StateRays::StateRays(const BerggrenState& s, const RayLayout& layout, cplx origin)
    : state_(&s), layout_(&layout), origin_(origin) {}

std::span<const cplx> StateRays::residuals(Sign omega, int theta_index, int panels,
                                           const RotationPolicy& policy) {
  auto& slot = cache_[4 * omega_slot(omega) + theta_index];
  const std::size_t need = static_cast<std::size_t>(panels) * layout_->nodes_per_panel;
  if (slot.size() < need) {
    // Grow geometrically so repeated requests do not redo the sweeps often.
    const std::size_t target =
        std::min(layout_->x.size(), std::max(need, 2 * slot.size() + 8 * layout_->nodes_per_panel));
    slot = component_residuals(*state_, omega, policy.allowed_thetas[theta_index],
                               std::span<const double>(layout_->x.data(), target), origin_);
  }
  return {slot.data(), std::min(slot.size(), need)};
}

cplx ray_pair_integral(StateRays& a, Sign wa, StateRays& b, Sign wb, const RotationPolicy& policy,
                       const RayLayout& layout, int power, int theta_index) {
  const BerggrenState& sa = a.state();
  const BerggrenState& sb = b.state();
  if (sa.negligible || sb.negligible) return 0.0;
  if ((wa == Sign::minus && sa.discrete()) || (wb == Sign::minus && sb.discrete())) return 0.0;
  if (a.origin() != b.origin()) throw DomainError("ray_pair_integral: rays start at different points");
  const cplx kappa = double(to_int(wa)) * sa.k + double(to_int(wb)) * sb.k;
  const int ti = theta_index >= 0 ? theta_index : select_theta(sa, wa, sb, wb, policy);
  const cplx dir = std::polar(1.0, policy.allowed_thetas[ti]);
  const int npp = layout.nodes_per_panel;

  cplx total = 0.0;
  int quiet = 0;
  int requested = 0;
  std::span<const cplx> ra, rb;
  for (int p = 0; p < layout.panels(); ++p) {
    if (p >= requested) {
      requested = std::min(layout.panels(), std::max(2 * requested, 24));
      ra = a.residuals(wa, ti, requested, policy);
      rb = b.residuals(wb, ti, requested, policy);
    }
    cplx panel = 0.0;
    for (int j = p * npp; j < (p + 1) * npp; ++j) {
      const cplx z = a.origin() + layout.x[j] * dir;
      cplx g = std::exp(kI * kappa * z + ra[j] + rb[j]);
      if (power > 0) g /= std::pow(z, power);
      panel += g * layout.wx[j];
    }
    panel *= dir;
    total += panel;
    if (std::abs(panel) <= policy.panel_threshold * std::abs(total)) {
      if (++quiet >= 2) return total;
    } else {
      quiet = 0;
    }
  }
  throw AccuracyError("ray integral did not converge within the ray layout");
}

cplx berggren_norm(const BerggrenState& state, const RadialGrid& grid) {
  cplx interior = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    interior += grid.weights[i] * state.u_interior[i] * state.u_interior[i];
  }
  static const RayLayout layout = RayLayout::make();
  RotationPolicy policy;
  policy.R = state.R;
  StateRays rays(state, layout);
  return interior + ray_pair_integral(rays, Sign::plus, rays, Sign::plus, policy, layout, 0);
}

BerggrenState normalize_discrete(BerggrenState state, const RadialGrid& grid) {
  if (!state.discrete()) throw DomainError("normalize_discrete: state is not a pole");
  const cplx norm = berggren_norm(state, grid);
  cplx f = 1.0 / std::sqrt(norm);
  // Keep real bound states real and positive near the origin.
  if (state.kind == StateKind::bound && f.real() < 0.0) f = -f;
  for (auto& v : state.u_interior) v *= f;
  for (auto& v : state.u_probe) v *= f;
  state.u_R *= f;
  state.du_R *= f;
  state.C_plus *= f;
  state.C_minus *= f;
  state.scale *= f;
  return state;
}

}  // namespace berggren

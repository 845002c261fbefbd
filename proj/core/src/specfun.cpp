#include "berggren/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "berggren/errors.hpp"
#include "ode.hpp"

namespace berggren {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// Largest term of a divergent expansion we tolerate relative to its sum.
constexpr double kMaxCancellation = 1e3;

// B_{2n} / (2n (2n-1)) for n = 1..10.
constexpr std::array<double, 10> kStirling = {
    1.0 / 12.0,          -1.0 / 360.0,          1.0 / 1260.0,      -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0,     1.0 / 156.0,       -3617.0 / 122400.0,
    43867.0 / 244188.0,  -174611.0 / 125400.0};

bool on_cut(cplx z) { return z.imag() == 0.0 && z.real() <= 0.0; }

// Magnitude-only test of the asymptotic expansion at radius r.
bool asymptotic_converges(const CoulombParams& p, Sign omega, double r) {
  const double w = to_int(omega);
  const cplx a = 1.0 + p.ell + kI * w * p.eta;
  const cplx b = -static_cast<double>(p.ell) + kI * w * p.eta;
  const double x = 2.0 * r;
  double t = 1.0;
  bool decreasing = false;
  for (int n = 0; n < 400; ++n) {
    const double next = t * std::abs((a + double(n)) * (b + double(n))) / ((n + 1) * x);
    if (next == 0.0 || next < 1e-17) return true;
    if (next > kMaxCancellation * 0.1) return false;
    if (next >= t) {
      if (decreasing) return false;
    } else {
      decreasing = true;
    }
    t = next;
  }
  return false;
}

struct RadiusCache {
  int ell = -1;
  cplx eta{};
  double radius = 0.0;
};

// Regular solution by its power series around the origin. Empty when the
// sum suffers from cancellation.
std::optional<CoulombValue> f_origin_series(const CoulombParams& p, cplx z) {
  const int l = p.ell;
  const cplx eta = p.eta;
  const cplx log_c = log_coulomb_normalization(l, eta);
  cplx a_prev2 = 0.0;
  cplx a_prev = 1.0;  // A_0
  cplx zk = 1.0;      // z^k
  cplx sum = 1.0;
  cplx dsum = double(l + 1);
  double max_term = 1.0;
  double max_dterm = double(l + 1);
  int small_run = 0;
  const int kmax = 400 + static_cast<int>(4.0 * std::abs(z));
  for (int k = 1; k < kmax; ++k) {
    const cplx ak = k == 1 ? eta / double(l + 1)
                           : (2.0 * eta * a_prev - a_prev2) / double(k * (k + 2 * l + 1));
    zk *= z;
    const cplx term = ak * zk;
    const cplx dterm = term * double(k + l + 1);
    sum += term;
    dsum += dterm;
    max_term = std::max(max_term, std::abs(term));
    max_dterm = std::max(max_dterm, std::abs(dterm));
    if (std::abs(term) <= 1e-17 * std::abs(sum) && std::abs(dterm) <= 1e-17 * std::abs(dsum) &&
        k > std::abs(z)) {
      if (++small_run >= 3) break;
    } else {
      small_run = 0;
    }
    if (k == kmax - 1) return std::nullopt;
    a_prev2 = a_prev;
    a_prev = ak;
  }
  if (max_term > kMaxCancellation * std::abs(sum) ||
      max_dterm > kMaxCancellation * std::abs(dsum)) {
    return std::nullopt;
  }
  // F = C z^{l+1} sum, F' = C z^l dsum.
  const cplx scale = std::exp(log_c) * std::pow(z, l);
  return CoulombValue{scale * z * sum, scale * dsum, false};
}

}  // namespace

cplx log_gamma(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
    throw DomainError("log_gamma: pole at non-positive integer");
  }
  cplx shift = 0.0;
  while (z.real() < 12.0) {
    shift += std::log(z);
    z += 1.0;
  }
  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx pw = inv;
  for (double c : kStirling) {
    series += c * pw;
    pw *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series - shift;
}

cplx coulomb_phase(int ell, cplx eta) {
  const cplx lp = log_gamma(1.0 + ell + kI * eta);
  const cplx lm = log_gamma(1.0 + ell - kI * eta);
  return (lp - lm) / (2.0 * kI);
}

cplx log_coulomb_normalization(int ell, cplx eta) {
  const cplx lp = log_gamma(1.0 + ell + kI * eta);
  const cplx lm = log_gamma(1.0 + ell - kI * eta);
  return ell * std::log(2.0) - 0.5 * kPi * eta + 0.5 * (lp + lm) -
         std::lgamma(2.0 * ell + 2.0);
}

double asymptotic_radius(const CoulombParams& p) {
  thread_local RadiusCache cache;
  if (cache.ell == p.ell && cache.eta == p.eta) return cache.radius;
  auto ok = [&](double r) {
    return asymptotic_converges(p, Sign::plus, r) && asymptotic_converges(p, Sign::minus, r);
  };
  double hi = 1.0;
  while (!ok(hi)) {
    hi *= 2.0;
    if (hi > 1e8) throw EvaluationFailure("asymptotic_radius: no convergence", p.ell, p.eta, hi);
  }
  double lo = 0.0;
  for (int it = 0; it < 50 && hi - lo > 1e-6 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  cache = {p.ell, p.eta, 1.05 * hi};
  return cache.radius;
}

std::optional<AsymptoticSeries> asymptotic_series(Sign omega, const CoulombParams& p, cplx z) {
  const double w = to_int(omega);
  const cplx a = 1.0 + p.ell + kI * w * p.eta;
  const cplx b = -static_cast<double>(p.ell) + kI * w * p.eta;
  const cplx x = 2.0 * kI * w * z;
  cplx t = 1.0;
  cplx sum = 0.0;  // T = S - 1
  cplx dsum = 0.0;
  double prev = 1.0;
  double max_term = 1.0;
  bool decreasing = false;
  for (int n = 0; n < 400; ++n) {
    t *= (a + double(n)) * (b + double(n)) / (double(n + 1) * x);
    const double mag = std::abs(t);
    sum += t;
    dsum -= double(n + 1) * t / z;
    max_term = std::max(max_term, mag);
    if (mag == 0.0 || mag < 1e-17 * std::abs(1.0 + sum)) {
      if (max_term > kMaxCancellation * std::abs(1.0 + sum)) return std::nullopt;
      return AsymptoticSeries{sum, dsum};
    }
    if (mag >= prev) {
      if (decreasing) return std::nullopt;
    } else {
      decreasing = true;
    }
    prev = mag;
  }
  return std::nullopt;
}

cplx asymptotic_phase_remainder(Sign omega, const CoulombParams& p, cplx log_2z) {
  const double w = to_int(omega);
  return kI * w * (-p.eta * log_2z - 0.5 * p.ell * kPi + coulomb_phase(p.ell, p.eta));
}

std::optional<CoulombValue> coulomb_H_asymptotic(Sign omega, const CoulombParams& p, cplx z,
                                                 cplx log_2z) {
  const auto s = asymptotic_series(omega, p, z);
  if (!s) return std::nullopt;
  const double w = to_int(omega);
  const cplx e = std::exp(kI * w * z + asymptotic_phase_remainder(omega, p, log_2z));
  const cplx S = 1.0 + s->T;
  return CoulombValue{e * S, e * (kI * w * (1.0 - p.eta / z) * S + s->dS), false};
}

CoulombValue coulomb_H(Sign omega, const CoulombParams& p, cplx z) {
  if (on_cut(z)) throw DomainError("coulomb_H: argument on the cut ]-inf, 0]");
  const double rho_a = asymptotic_radius(p);
  const double mag = std::abs(z);
  if (mag >= rho_a && (z.real() >= 0.0 || std::abs(z.imag()) >= 0.5 * mag)) {
    if (auto v = coulomb_H_asymptotic(omega, p, z, std::log(2.0 * z))) return *v;
  }

  // Horizontal propagation from a point where the expansion holds. Both
  // solutions oscillate along horizontal lines, so the path is neutrally
  // stable; a short vertical leg keeps it away from the origin when needed.
  double y = z.imag();
  bool vertical = false;
  if (z.real() <= 0.0 && std::abs(y) < 1.0) {
    y = y > 0.0 ? 1.0 : -1.0;
    vertical = true;
  }
  // The radius estimate works on term magnitudes; for complex eta the sum
  // can still cancel there, in which case the anchor moves outwards.
  cplx anchor{std::max(rho_a, z.real() + 1.0), y};
  auto start = coulomb_H_asymptotic(omega, p, anchor, std::log(2.0 * anchor));
  for (int tries = 0; !start && tries < 12; ++tries) {
    anchor = {2.0 * anchor.real(), y};
    start = coulomb_H_asymptotic(omega, p, anchor, std::log(2.0 * anchor));
  }
  if (!start) throw EvaluationFailure("coulomb_H: anchor expansion failed", p.ell, p.eta, z);

  auto q = [p](cplx s) { return coulomb_equation_coefficient(p, s); };
  detail::OdeState state{start->value, start->derivative};
  double peak = std::abs(state[0]);

  auto prop = detail::make_propagator(anchor, cplx{-1.0, 0.0}, q);
  double t = 0.0;
  const double t_end = anchor.real() - z.real();
  const int pieces = std::max(1, static_cast<int>(std::ceil(t_end / 2.0)));
  for (int i = 1; i <= pieces; ++i) {
    prop.advance(state, t, t_end * i / pieces);
    peak = std::max(peak, std::abs(state[0]));
  }
  if (vertical) {
    const cplx from{z.real(), y};
    auto leg = detail::make_propagator(from, cplx{0.0, y > 0.0 ? -1.0 : 1.0}, q);
    double tv = 0.0;
    leg.advance(state, tv, std::abs(y - z.imag()));
    peak = std::max(peak, std::abs(state[0]));
  }
  if (!std::isfinite(state[0].real()) || !std::isfinite(state[0].imag())) {
    throw EvaluationFailure("coulomb_H: propagation overflow", p.ell, p.eta, z);
  }
  const bool degraded = peak > 1e3 * std::abs(state[0]);
  return CoulombValue{state[0], state[1], degraded};
}

CoulombValue coulomb_F(const CoulombParams& p, cplx z) {
  if (z == 0.0) throw DomainError("coulomb_F: z = 0");
  if (std::abs(z) < 60.0) {
    if (auto v = f_origin_series(p, z)) return *v;
  }
  if (on_cut(z)) {
    throw EvaluationFailure("coulomb_F: series failed on the negative real axis", p.ell, p.eta,
                            z);
  }
  const CoulombValue hp = coulomb_H(Sign::plus, p, z);
  const CoulombValue hm = coulomb_H(Sign::minus, p, z);
  const cplx f = (hp.value - hm.value) / (2.0 * kI);
  const cplx df = (hp.derivative - hm.derivative) / (2.0 * kI);
  const double big = std::max(std::abs(hp.value), std::abs(hm.value));
  if (big > 1e6 * std::abs(f)) {
    throw EvaluationFailure("coulomb_F: cancellation in (H+ - H-)/2i", p.ell, p.eta, z);
  }
  return CoulombValue{f, df, hp.degraded || hm.degraded || big > 1e3 * std::abs(f)};
}

double erf_real(double x) { return std::erf(x); }

}  // namespace berggren

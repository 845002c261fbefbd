#pragma once

// Adaptive propagation of u'' = q(s) u along straight lines of the complex
// plane. Private to the core library.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "berggren/errors.hpp"

namespace berggren::detail {

using cplx = std::complex<double>;
using OdeState = std::array<cplx, 2>;  // (u, du/ds)

inline constexpr double kOdeRelTol = 1e-13;

/// Integrates u'' = q(s) u along s(t) = origin + t * direction for real t.
/// The state derivative component is du/ds, not du/dt.
template <class Coefficient>
class LinePropagator {
 using Stepper = boost::numeric::odeint::controlled_runge_kutta<
      boost::numeric::odeint::runge_kutta_fehlberg78<OdeState>>;

 public:
  LinePropagator(cplx origin, cplx direction, Coefficient q, double rtol = kOdeRelTol)
      : origin_(origin),
        dir_(direction),
        q_(std::move(q)),
        stepper_(typename Stepper::error_checker_type(0.0, rtol, 1.0, 1.0)) {}

  cplx point(double t) const { return origin_ + t * dir_; }

  /// Moves (y, t) to t_end.
  void advance(OdeState& y, double& t, double t_end) {
    namespace ode = boost::numeric::odeint;
    if (t == t_end) return;
    const double span = std::abs(t_end - t);
    if (dt_ <= 0.0) dt_ = std::min(0.05, 0.1 * span);
    const double sign = t_end > t ? 1.0 : -1.0;
    auto sys = [this](const OdeState& x, OdeState& dx, double tt) {
      const cplx s = origin_ + tt * dir_;
      dx[0] = dir_ * x[1];
      dx[1] = dir_ * q_(s) * x[0];
    };
    long guard = 0;
    while (t != t_end) {
      const double remaining = std::abs(t_end - t);
      bool clamped = false;
      double h = dt_;
      if (h >= remaining) {
        h = remaining;
        clamped = true;
      }
      double hs = sign * h;
      if (stepper_.try_step(sys, y, t, hs) == ode::success) {
        if (clamped) t = t_end;
        if (!clamped || std::abs(hs) > dt_) dt_ = std::abs(hs);
      } else {
        dt_ = std::abs(hs);
        if (dt_ < 1e-14 * (1.0 + std::abs(t))) {
          throw Error("ODE step size underflow along complex path");
        }
      }
      if (++guard > 20'000'000) throw Error("ODE propagation exceeded step budget");
    }
  }

 private:
  cplx origin_;
  cplx dir_;
  Coefficient q_;
  Stepper stepper_;
  double dt_ = -1.0;
};

template <class Coefficient>
LinePropagator<Coefficient> make_propagator(cplx origin, cplx direction, Coefficient q,
                                            double rtol = kOdeRelTol) {
  return LinePropagator<Coefficient>(origin, direction, std::move(q), rtol);
}

}  // namespace berggren::detail

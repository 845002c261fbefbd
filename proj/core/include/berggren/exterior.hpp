#pragma once

// Exterior parts of radial integrals, evaluated along rotated rays
// z(x) = R + x e^{i theta}. Along a ray each outgoing/incoming component
// C^w H^w(k z) is stored through its residual log
//   r(x) = log(C^w H^w(k z(x))) - i w k z(x),
// which stays bounded where the component itself would overflow.

#include <array>
#include <numbers>
#include <span>
#include <vector>

#include "berggren/potential.hpp"
#include "berggren/radial.hpp"

namespace berggren {

inline constexpr std::array<double, 4> kRotationAngles = {
    -0.75 * std::numbers::pi, -0.25 * std::numbers::pi, 0.25 * std::numbers::pi,
    0.75 * std::numbers::pi};

/// Radius beyond which integrals are rotated, and the admissible angles.
struct RotationPolicy {
  double R = 15.0;
  std::array<double, 4> allowed_thetas = kRotationAngles;
  // A ray integral stops after two consecutive panels below this fraction
  // of the accumulated value.
  double panel_threshold = 1e-15;

  /// Checks that the nuclear tail and the charge smearing are negligible at R.
  void validate(const PotentialParams& p) const;

  bool operator==(const RotationPolicy&) const = default;
};

/// Index into allowed_thetas of the angle giving the steepest decay of
/// exp(i kappa z); throws SingularPairError when none decays.
int select_theta(cplx kappa, const RotationPolicy& policy);

/// True if the ray at angle theta keeps k z off the Coulomb cut, which only
/// non-discrete states require.
bool ray_admissible(const BerggrenState& s, double theta);

/// Angle for the product C_a^{wa} H^{wa}(k_a z) C_b^{wb} H^{wb}(k_b z): the
/// steepest decay of exp(i kappa z) among rays admissible for both states,
/// ties going to the ray farther from the cut. Throws SingularPairError when
/// no admissible ray decays.
int select_theta(const BerggrenState& a, Sign wa, const BerggrenState& b, Sign wb,
                 const RotationPolicy& policy);

/// Gauss-Legendre panels along a ray: 2 fm panels up to 40 fm, then
/// geometrically growing panels.
struct RayLayout {
  std::vector<double> edges;
  int nodes_per_panel = 32;
  std::vector<double> x;
  std::vector<double> wx;

  static RayLayout make(double x_max = 1e6, int nodes_per_panel = 32);
  int panels() const { return static_cast<int>(edges.size()) - 1; }
};

/// Residual logs of C^w H^w(k z(x)) at the sorted abscissae xs.
std::vector<cplx> component_residuals(const BerggrenState& s, Sign omega, double theta,
                                      std::span<const double> xs);

/// The same along z(x) = origin + x e^{i theta}, for an origin in the right
/// half plane reached from R without crossing the Coulomb cut.
std::vector<cplx> component_residuals(const BerggrenState& s, Sign omega, double theta,
                                      std::span<const double> xs, cplx origin);

/// C^w H^w(k z(x)), continued analytically along the ray from z = R.
/// Scattering and resonant states may not cross the Coulomb cut.
cplx exterior_component(const BerggrenState& s, Sign omega, double theta, double x);

/// Residual caches of one state along every admissible ray from a common
/// origin, R unless given.
class StateRays {
 public:
  StateRays(const BerggrenState& s, const RayLayout& layout);
  StateRays(const BerggrenState& s, const RayLayout& layout, cplx origin);

  const BerggrenState& state() const { return *state_; }
  cplx origin() const { return origin_; }

  /// Residuals on the first `panels` panels of the layout.
  std::span<const cplx> residuals(Sign omega, int theta_index, int panels,
                                  const RotationPolicy& policy);

 private:
  const BerggrenState* state_;
  const RayLayout* layout_;
  cplx origin_;
  std::array<std::vector<cplx>, 8> cache_;
};

/// Integral over x >= 0 of  C_a^{wa} H^{wa}(k_a z) C_b^{wb} H^{wb}(k_b z) g(z) dz
/// along the ray selected for kappa = wa k_a + wb k_b, where g(z) = z^{-power}
/// and z runs from the common origin of both caches.
/// Throws AccuracyError if the layout ends before convergence.
cplx ray_pair_integral(StateRays& a, Sign wa, StateRays& b, Sign wb, const RotationPolicy& policy,
                       const RayLayout& layout, int power = 1, int theta_index = -1);

}  // namespace berggren

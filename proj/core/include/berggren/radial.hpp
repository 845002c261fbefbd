#pragma once

#include <optional>
#include <span>
#include <vector>

#include "berggren/potential.hpp"
#include "berggren/specfun.hpp"

namespace berggren {

/// Interior quadrature on [0, R] plus the uniform comparison grid
/// r_j = j R / n_probe, j = 1..n_probe.
struct RadialGrid {
  double R = 15.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> probe;

  static RadialGrid make(double R = 15.0, int n_nodes = 300, int n_probe = 512);
};

enum class StateKind { bound, resonant, scattering };

const char* to_string(StateKind kind);

/// One member of a Berggren basis. For r >= R the wave function is
/// C+ H+(k r) + C- H-(k r) with Sommerfeld parameter eta.
struct BerggrenState {
  StateKind kind = StateKind::scattering;
  PartialWave pw;
  cplx k;
  cplx e;    // MeV
  cplx eta;
  cplx w{1.0, 0.0};  // quadrature weight, 1 for discrete states
  double R = 15.0;
  std::vector<cplx> u_interior;  // on RadialGrid::nodes
  std::vector<cplx> u_probe;     // on RadialGrid::probe
  cplx u_R;
  cplx du_R;
  cplx C_plus;
  cplx C_minus;
  // Factor between u and the regular solution normalized as r^{l+1} at the origin.
  cplx scale{1.0, 0.0};
  // Set for scattering states so deep in the barrier that they vanish numerically.
  bool negligible = false;

  CoulombParams coulomb() const { return {pw.ell, eta}; }
  bool discrete() const { return kind != StateKind::scattering; }
  /// Width -2 Im(e) in keV.
  double width_keV() const { return -2000.0 * e.imag(); }
};

/// Regular solution normalized as r^{l+1} near the origin.
struct RegularSolution {
  std::vector<cplx> samples;  // at the requested radii
  cplx u_R;
  cplx du_R;
  double log_scale = 0.0;  // samples and u_R are multiplied by exp(-log_scale)
};

/// Integrates u'' = [l(l+1)/r^2 + (V(r) - e)/(hbar^2/2m)] u outwards. The full
/// potential is used up to R and the point Coulomb tail beyond it, so radii
/// past R are allowed. Radii must be sorted ascending and positive.
RegularSolution integrate_regular(cplx k, const PotentialParams& p, const PartialWave& pw,
                                  double R, std::span<const double> radii = {});

/// Interior samples of the regular solution on a RadialGrid (nodes then probe).
struct InteriorSolution {
  std::vector<cplx> u;
  std::vector<cplx> u_probe;
  cplx u_R;
  cplx du_R;
};
InteriorSolution integrate_interior(cplx k, const PotentialParams& p, const PartialWave& pw,
                                    const RadialGrid& grid);

/// Sommerfeld parameter Z C_c / (2 (hbar^2/2m) k).
cplx sommerfeld(cplx k, double Z, const PotentialParams& p);

/// Decomposes (u, u') at r = R into C+ H+(kR) + C- H-(kR).
struct MatchingCoefficients {
  cplx C_plus;
  cplx C_minus;
};
MatchingCoefficients match(cplx k, cplx eta, int ell, double R, cplx u_R, cplx du_R);

/// Scattering state scaled so that 2 pi C+ C- = 1. When `reference_scale`
/// is given, the square-root branch closest to it is used.
BerggrenState make_scattering(cplx k, const PotentialParams& p, const PartialWave& pw,
                              const RadialGrid& grid,
                              std::optional<cplx> reference_scale = std::nullopt);

/// Outgoing-wave mismatch u'/(k u) - H+'/H+ at R; zero exactly at a pole.
cplx pole_mismatch(cplx k, const PotentialParams& p, const PartialWave& pw, double R);

/// Rectangle of the complex k plane searched for poles.
struct ScanRegion {
  cplx lower_left;
  cplx upper_right;
};

/// Default search windows: resonances near the real axis and bound states
/// along the positive imaginary axis.
std::vector<ScanRegion> default_scan_regions();

/// Pole seeds located with the argument principle applied to
/// (u'/k) H+ - u H+' on the boundaries of recursively split rectangles.
std::vector<cplx> scan_poles(const PotentialParams& p, const PartialWave& pw, double R,
                             const std::vector<ScanRegion>& regions = default_scan_regions());

/// Secant refinement of a pole followed by Berggren normalization.
BerggrenState find_pole(cplx k_guess, const PotentialParams& p, const PartialWave& pw,
                        const RadialGrid& grid);

/// Rescales a discrete state to unit Berggren norm, the exterior part being
/// integrated along a rotated ray.
BerggrenState normalize_discrete(BerggrenState state, const RadialGrid& grid);

/// Berggren norm of a discrete state: interior quadrature plus rotated exterior.
cplx berggren_norm(const BerggrenState& state, const RadialGrid& grid);

/// Continues u along the real axis beyond R with the point Coulomb equation.
std::vector<cplx> sample_beyond(const BerggrenState& state, std::span<const double> radii);

/// Values and derivatives du/dz of a solution along a straight path.
struct PathSamples {
  std::vector<cplx> u;
  std::vector<cplx> du;
};

/// Continues u from z = R to z = R + t * direction for the sorted t >= 0 of
/// `ts`, without splitting it into outgoing and incoming parts. Scattering
/// states are propagated with the point Coulomb equation; discrete states,
/// which are purely outgoing, are evaluated as C+ H+(kz).
PathSamples continue_exterior(const BerggrenState& state, cplx direction,
                              std::span<const double> ts);

}  // namespace berggren

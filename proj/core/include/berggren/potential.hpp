#pragma once

#include <cmath>
#include <numbers>
#include <string>

namespace berggren {

/// Orbital and total angular momentum of a single-nucleon partial wave.
struct PartialWave {
  int ell = 0;
  int two_j = 1;

  /// Validates |2j - 2l| = 1; throws ConfigurationError otherwise.
  static PartialWave make(int ell, int two_j);

  /// j(j+1) - l(l+1) - 3/4, which is twice the eigenvalue of l.s.
  double ls_factor() const {
    const double j = 0.5 * two_j;
    return j * (j + 1.0) - ell * (ell + 1.0) - 0.75;
  }

  /// Spectroscopic label such as "d5/2".
  std::string label() const;

  bool operator==(const PartialWave&) const = default;
};

/// Woods-Saxon and Coulomb parameters plus the physical constants.
struct PotentialParams {
  double V_o = 52.0;                // MeV
  double V_so = 5.0;                // MeV
  double R_0 = 3.0;                 // fm
  double d = 0.65;                  // fm
  double alpha = 3.0 * std::sqrt(std::numbers::pi) / (4.0 * 3.0);  // fm^-1
  double Z_c = 10.0;                // charge generating the potential
  double C_c = 1.43996;             // MeV fm
  double hbar2_over_2m = 20.749;    // MeV fm^2

  /// Throws ConfigurationError unless d, R_0, alpha and hbar2_over_2m are positive.
  void validate() const;

  bool operator==(const PotentialParams&) const = default;
};

/// Fermi profile f(r) = 1 / (1 + exp((r - R_0)/d)).
double fermi(double r, const PotentialParams& p);

/// Closed-form df/dr = -f (1 - f) / d.
double fermi_derivative(double r, const PotentialParams& p);

/// Central plus spin-orbit Woods-Saxon potential in MeV. Requires r > 0.
double v_ws(double r, const PotentialParams& p, const PartialWave& pw);

/// Coulomb potential of an error-function charge profile, C_c Z erf(alpha r) / r.
double v_coul(double r, double Z, const PotentialParams& p);

/// v_ws + v_coul with the charge stored in the parameters.
double v_total(double r, const PotentialParams& p, const PartialWave& pw);

/// Coefficient of 1/r in the small-r expansion of v_total, in MeV fm.
/// The spin-orbit term is the only source of such a singularity.
double v_total_inverse_r_coefficient(const PotentialParams& p, const PartialWave& pw);

}  // namespace berggren

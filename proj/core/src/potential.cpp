#include "berggren/potential.hpp"

#include <cmath>
#include <cstdlib>

#include "berggren/errors.hpp"
#include "berggren/specfun.hpp"

namespace berggren {

PartialWave PartialWave::make(int ell, int two_j) {
  if (ell < 0 || two_j <= 0 || std::abs(two_j - 2 * ell) != 1) {
    throw ConfigurationError("invalid partial wave: l=" + std::to_string(ell) +
                             " 2j=" + std::to_string(two_j));
  }
  return PartialWave{ell, two_j};
}

std::string PartialWave::label() const {
  static constexpr char kLetters[] = "spdfghik";
  const char letter = ell < 8 ? kLetters[ell] : '?';
  return std::string(1, letter) + std::to_string(two_j) + "/2";
}

void PotentialParams::validate() const {
  if (!(d > 0.0) || !(R_0 > 0.0) || !(alpha > 0.0) || !(hbar2_over_2m > 0.0)) {
    throw ConfigurationError("potential parameters d, R_0, alpha and hbar2_over_2m must be positive");
  }
}

double fermi(double r, const PotentialParams& p) {
  return 1.0 / (1.0 + std::exp((r - p.R_0) / p.d));
}

double fermi_derivative(double r, const PotentialParams& p) {
  const double f = fermi(r, p);
  return -f * (1.0 - f) / p.d;
}

double v_ws(double r, const PotentialParams& p, const PartialWave& pw) {
  if (!(r > 0.0)) throw DomainError("v_ws: r must be positive");
  // 4 (l.s) with l.s = ls_factor / 2.
  const double so = 2.0 * pw.ls_factor() * p.V_so * std::abs(fermi_derivative(r, p)) / r;
  return -p.V_o * fermi(r, p) - so;
}

double v_coul(double r, double Z, const PotentialParams& p) {
  if (Z == 0.0) return 0.0;
  if (r < 1e-8 / p.alpha) {
    // erf(x)/x = 2/sqrt(pi) (1 - x^2/3 + ...)
    const double x = p.alpha * r;
    return p.C_c * Z * p.alpha * 2.0 / std::sqrt(std::numbers::pi) * (1.0 - x * x / 3.0);
  }
  return p.C_c * Z * erf_real(p.alpha * r) / r;
}

double v_total(double r, const PotentialParams& p, const PartialWave& pw) {
  return v_ws(r, p, pw) + v_coul(r, p.Z_c, p);
}

double v_total_inverse_r_coefficient(const PotentialParams& p, const PartialWave& pw) {
  return -2.0 * pw.ls_factor() * p.V_so * std::abs(fermi_derivative(0.0, p));
}

}  // namespace berggren

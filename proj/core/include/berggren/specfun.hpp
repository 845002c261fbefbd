#pragma once

// Coulomb wave functions of complex argument and complex Sommerfeld
// parameter, plus the real error function used by the charge profile.
//
// Conventions:
//   H^{+/-}_{l,eta}(z) = G_{l,eta}(z) +/- i F_{l,eta}(z)
//   H^{+/-} ~ exp(+/- i [z - eta ln(2z) - l pi/2 + sigma_l])   (|z| -> inf)
//   sigma_l(eta) = [lnGamma(1+l+i eta) - lnGamma(1+l-i eta)] / (2i)
// with the principal branch of lnGamma and ln(2z).  With this choice
//   F (G)' - F' G          = -1
//   H+ (H-)' - (H+)' H-    = -2i
// for every (l, eta, z) off the cut ]-inf, 0].

#include <complex>
#include <optional>

namespace berggren {

using cplx = std::complex<double>;

/// Outgoing (+) or incoming (-) character of a Coulomb/Hankel function.
enum class Sign : int { minus = -1, plus = +1 };

constexpr int to_int(Sign s) { return static_cast<int>(s); }
constexpr Sign flip(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }

struct CoulombParams {
  int ell = 0;
  cplx eta{0.0, 0.0};
};

struct CoulombValue {
  cplx value;
  cplx derivative;  // d/dz
  bool degraded = false;  // estimated relative error above 1e-10
};

/// Principal branch of ln Gamma(z). Throws DomainError at the poles.
cplx log_gamma(cplx z);

/// Coulomb phase shift sigma_l(eta), analytically continued in eta.
cplx coulomb_phase(int ell, cplx eta);

/// ln C_l(eta), the normalization of F at the origin: F ~ C_l z^{l+1}.
cplx log_coulomb_normalization(int ell, cplx eta);

/// Regular Coulomb wave function F and its derivative.
CoulombValue coulomb_F(const CoulombParams& p, cplx z);

/// Outgoing/incoming Coulomb wave function H^{omega} and its derivative.
/// Refuses arguments on the cut ]-inf, 0].
CoulombValue coulomb_H(Sign omega, const CoulombParams& p, cplx z);

/// Error function for real argument.
double erf_real(double x);

/// Coefficient q(z) of the Coulomb equation u'' = q(z) u.
inline cplx coulomb_equation_coefficient(const CoulombParams& p, cplx z) {
  const double ll = static_cast<double>(p.ell) * (p.ell + 1);
  return ll / (z * z) + 2.0 * p.eta / z - 1.0;
}

// -- Asymptotic expansion ------------------------------------------------
//
// H^{omega}(z) = exp(i omega z + remainder) * S(z), with
//   remainder = i omega (-eta ln(2z) - l pi/2 + sigma_l)
//   S(z)      = 1 + T(z) = sum_n (a)_n (b)_n / (n! (2 i omega z)^n),
//   a = 1 + l + i omega eta,  b = -l + i omega eta.
// The log of 2z is passed in explicitly so callers can follow a continuous
// branch across the negative real axis.

struct AsymptoticSeries {
  cplx T;   // S - 1
  cplx dS;  // dS/dz
};

/// Smallest |z| for which the expansion converges to double precision for
/// both characters, with a small safety margin.
double asymptotic_radius(const CoulombParams& p);

/// Sums the expansion at z; empty if it does not reach double precision.
std::optional<AsymptoticSeries> asymptotic_series(Sign omega, const CoulombParams& p,
                                                  cplx z);

/// i omega (-eta log_2z - l pi/2 + sigma_l).
cplx asymptotic_phase_remainder(Sign omega, const CoulombParams& p, cplx log_2z);

/// H^{omega} and dH/dz from the expansion with an explicit ln(2z).
std::optional<CoulombValue> coulomb_H_asymptotic(Sign omega, const CoulombParams& p,
                                                 cplx z, cplx log_2z);

}  // namespace berggren

#pragma once

// Quadrature study of the shifted-node treatment of the logarithmic
// diagonal, on the real momentum segment [0, k_max] with sine states
// s_k(r) = sqrt(2/pi) sin(k r).
//
// Matrix elements split V_c into the short-range part -C erfc(alpha r)/r,
// integrated with a fixed radial Gauss-Legendre rule, and the point-Coulomb
// part C/r, whose sine element is (C/pi) ln((k' + k)/|k' - k|).

#include <iosfwd>
#include <optional>
#include <vector>

#include "berggren/quadrature.hpp"

namespace berggren {

struct StudyConfig {
  std::optional<double> alpha = 0.45;  // fm^-1; empty means point Coulomb
  double k_max = 2.0;                  // fm^-1
  int n_gl = 50;
  int radial_nodes = 300;
  double radial_R = 30.0;  // fm
  double delta_Z = -2.0;
  double C_c = 1.43996;

  /// Throws ConfigurationError on non-positive sizes or ranges.
  void validate() const;
};

class SineStudy {
 public:
  explicit SineStudy(const StudyConfig& cfg);

  const StudyConfig& config() const { return cfg_; }
  /// Gauss-Legendre nodes and weights on [0, k_max].
  const GaussLegendreRule& momentum_rule() const { return momenta_; }

  /// <s_a | -C erfc(alpha r)/r | s_b> on the radial rule (0 for point Coulomb).
  double short_range(double a, double b) const;
  /// <s_a | C/r | s_b> = (C/pi) ln((a + b)/|a - b|) for a != b.
  double point_coulomb(double a, double b) const;
  double element(double a, double b) const { return short_range(a, b) + point_coulomb(a, b); }

  /// Integral over k' in [0, k_max] of <s_k'|V_c|s_k>: a composite
  /// Gauss-Legendre k' integral of the short-range part, refined until two
  /// successive levels agree to 1e-10, plus the closed form of the C/r part.
  /// Throws DomainError unless 0 < k < k_max and AccuracyError if the
  /// refinement does not settle.
  double reference_I(double k) const;

  /// Gauss-Legendre sum over the momentum nodes with the diagonal term
  /// taken between k_i +- w_i/(4 pi).
  double discrete_I_GL(int i) const;

 private:
  StudyConfig cfg_;
  GaussLegendreRule radial_;
  GaussLegendreRule momenta_;
  std::vector<double> tail_;  // (2/pi) * radial weight * (-C erfc(alpha r)/r)
};

struct StudyPoint {
  double k = 0.0;
  double I_ref = 0.0;
  double I_gl = 0.0;
  double delta_I = 0.0;  // |I_gl - I_ref| / max_j |I_ref(k_j)|
};

std::vector<StudyPoint> delta_I(const StudyConfig& cfg);

/// 3 alphas plus point Coulomb, k_max in {1, 2, 4}, N_GL in {50, 100, 200}.
std::vector<StudyConfig> default_sweep();

/// Header "alpha,k_max,n_gl,k,I_ref,I_gl,delta_I", one row per node; alpha
/// is written as "point" for the point-Coulomb case. digits <= 0 selects the
/// shortest round-trip representation.
void write_study_csv(const std::vector<StudyConfig>& sweep, std::ostream& out, int digits = 0);

}  // namespace berggren

#pragma once

// Matrix of the residual Coulomb interaction between the members of a
// discretized Berggren basis, under the three treatments of its singular
// scattering diagonal.

#include <cmath>
#include <iosfwd>
#include <numbers>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "berggren/basis.hpp"
#include "berggren/exterior.hpp"

namespace berggren {

/// V_c(dZ, r) = C_c dZ erf(alpha r) / r: the difference between the
/// Coulomb potentials of the diagonalized and basis Hamiltonians.
struct ResidualCoulomb {
  double delta_Z = 0.0;
  double C_c = 1.43996;
  double alpha = 3.0 * std::sqrt(std::numbers::pi) / (4.0 * 3.0);

  /// dZ = Z_diag - p.Z_c with the smearing and constant of p.
  static ResidualCoulomb between(const PotentialParams& basis_potential, double Z_diag);

  /// Strength C_c dZ of the 1/r tail.
  double strength() const { return C_c * delta_Z; }
  double operator()(double r) const;
};

enum class Scheme { cut, subtraction, offdiag };

const char* to_string(Scheme s);
/// Accepts "cut", "sub"/"subtraction" and "offdiag"; throws ConfigurationError.
Scheme scheme_from_string(std::string_view s);

struct KernelMatrix {
  int n = 0;
  Eigen::MatrixXcd elements;
  std::vector<cplx> basis_energies;
  double delta_Zc = 0.0;
  Scheme scheme = Scheme::offdiag;

  /// max |M_ij - M_ji| / max |M_ij| (0 for a zero matrix).
  double asymmetry() const;
};

struct KernelOptions {
  RotationPolicy policy;    // policy.R must not be below the basis grid radius
  double R_cut = 75.0;      // cut scheme only
  double cut_panel = 2.0;   // fm, Gauss-Legendre panel length beyond R for the cut scheme
  int cut_nodes_per_panel = 24;
};

/// sqrt(w_a w_b) <u_a|V_c|u_b> with the interior on [0, policy.R] and the
/// four (omega_a, omega_b) exterior terms on rotated rays. Throws
/// SingularPairError for a scattering state paired with itself.
cplx matel(const BerggrenState& a, const BerggrenState& b, const RadialGrid& grid,
           const ResidualCoulomb& v, const RotationPolicy& policy);

/// The same state seen from a larger matching radius: u_R, du_R and R are
/// replaced by the values of its exterior form at R_new.
BerggrenState rebase(const BerggrenState& s, double R_new);

/// Closed form of the sine-basis integral over k' in [0, k_max] of
/// <s_k'|C/r|s_k>: (C/pi)[(k_max+k)ln(k_max+k) - (k_max-k)ln(k_max-k) - 2k ln k].
cplx analytic_sine_integral(cplx k, double k_max, double strength);

/// w * integral over r of (u_k^2 V_c - s_k^2 C_c dZ / r) for a
/// Dirac-normalized scattering state, s_k = sqrt(2/pi) sin(kr).
cplx regularized_diagonal_integral(const BerggrenState& s, const RadialGrid& grid,
                                   const ResidualCoulomb& v, const RotationPolicy& policy);

/// Cut radius used for a partial wave: 35 fm for d3/2 and 75 fm otherwise.
double default_cut_radius(const PartialWave& pw);

KernelMatrix assemble_cut(const DiscretizedBasis& basis, const ResidualCoulomb& v,
                          const KernelOptions& options = {});
KernelMatrix assemble_subtraction(const DiscretizedBasis& basis, const ResidualCoulomb& v,
                                  const KernelOptions& options = {});
KernelMatrix assemble_offdiag(const DiscretizedBasis& basis, const ResidualCoulomb& v,
                              const KernelOptions& options = {});
KernelMatrix assemble(Scheme scheme, const DiscretizedBasis& basis, const ResidualCoulomb& v,
                      const KernelOptions& options = {});

/// Text export: a header line "n <n> scheme <tag> delta_Zc <dZ>", then n
/// lines of basis energies "re im", then n*n lines "re im" in row-major order.
void write_matrix(const KernelMatrix& m, std::ostream& out);

}  // namespace berggren

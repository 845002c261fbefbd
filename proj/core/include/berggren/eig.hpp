#pragma once

// Diagonalization of basis energies plus residual kernel, selection of the
// physical eigenstate and comparison of its wave function with direct
// integration.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "berggren/basis.hpp"
#include "berggren/kernel.hpp"

namespace berggren {

/// Full spectrum of diag(e_i) + M. Eigenvector columns are Berggren
/// normalized (sum of c_i^2 = 1, no conjugation).
struct Decomposition {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd vectors;
  double matrix_norm = 0.0;  // Frobenius norm of the diagonalized matrix
};

struct DiagOptions {
  /// Where the matrix is written when the eigensolver fails; empty selects
  /// a file in the system temporary directory.
  std::string failure_dump;
  double residual_tolerance = 1e-10;
};

/// Throws EigensolverError (after dumping the matrix) on non-convergence
/// or when an eigenvector has vanishing Berggren norm.
Decomposition diagonalize(const KernelMatrix& kernel, const DiagOptions& options = {});

/// ||(H - lambda) v|| / ||H|| for column `index`.
double eigen_residual(const KernelMatrix& kernel, const Decomposition& d, int index);

struct Selection {
  int index = -1;
  double weight = 0.0;          // |c_pole|^2 of the selected vector
  std::vector<int> candidates;  // best three by weight, descending
  bool ambiguous = false;       // weight below 0.5
  std::string warning;
};

/// Eigenvector with the largest |c_pole|^2; near ties go to the eigenvalue
/// closest to `reference_energy` when given.
Selection select_state(const Decomposition& d, int pole_index,
                       std::optional<cplx> reference_energy = std::nullopt);

/// u(r) = sum_i c_i sqrt(w_i) u_i(r) on the probe grid (or the interior
/// nodes when `on_nodes` is set).
std::vector<cplx> reconstruct(const Eigen::VectorXcd& coefficients, const DiscretizedBasis& basis,
                              bool on_nodes = false);

/// Root mean squares of the real and imaginary parts of u - u_exact.
/// Throws DomainError on size mismatch.
std::pair<double, double> rms_compare(const std::vector<cplx>& u,
                                      const std::vector<cplx>& u_exact);

/// Factor f with f^2 = 1 / int_0^R u^2 (Berggren norm on the interior
/// grid) and the sign giving Re int_0^R f u u_ref >= 0.
cplx alignment_factor(const std::vector<cplx>& u_nodes, const std::vector<cplx>& ref_nodes,
                      const RadialGrid& grid);

struct DiagResult {
  std::vector<cplx> eigenvalues;
  int selected_index = -1;
  Eigen::VectorXcd coefficients;
  double E = 0.0;       // MeV
  double Gamma = 0.0;   // keV
  double pole_weight = 0.0;
  std::string warning;
  std::vector<cplx> u_reconstructed;  // aligned, on the probe grid
  double rms_re = 0.0;
  double rms_im = 0.0;
  double residual = 0.0;
};

/// Diagonalizes, selects the eigenvector dominated by basis state
/// `pole_index`, reconstructs it and compares it with `exact`, both being
/// normalized on [0, R] by alignment_factor.
DiagResult solve(const DiscretizedBasis& basis, const KernelMatrix& kernel, int pole_index,
                 const BerggrenState& exact, const DiagOptions& options = {});

}  // namespace berggren

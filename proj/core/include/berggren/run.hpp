#pragma once

// Orchestration of complete calculations from a RunConfig: pole tables,
// single diagonalizations and the N_GL sweep tables. Everything runs
// sequentially, so output order and content are deterministic.

#include <iosfwd>
#include <string>
#include <vector>

#include "berggren/basis.hpp"
#include "berggren/config.hpp"
#include "berggren/eig.hpp"
#include "berggren/kernel.hpp"

namespace berggren {

/// Potential of the basis Hamiltonian (charge Z_basis).
PotentialParams basis_potential(const RunConfig& c);
/// The same potential with the charge of the diagonalized Hamiltonian.
PotentialParams diag_potential(const RunConfig& c);
RadialGrid make_grid(const RunConfig& c);

/// k_min of the contour: zero for the cut scheme when cut_from_origin is
/// set, the configured value when given, and otherwise the resolved root.
double contour_kmin(const RunConfig& c, const PartialWave& pw, Scheme scheme);
/// Configured vertices when present for the wave, else the default contour.
ContourSpec make_contour(const RunConfig& c, const PartialWave& pw, double k_min, int n_gl);
KernelOptions kernel_options(const RunConfig& c, const PartialWave& pw);

struct PoleRow {
  std::string wave;
  std::string hamiltonian;  // "basis" or "diag"
  double Z = 0.0;
  StateKind kind = StateKind::resonant;
  cplx k;
  double E = 0.0;      // MeV
  double Gamma = 0.0;  // keV
};

/// Every pole enclosed by the default contour of each configured wave,
/// under both Hamiltonians.
std::vector<PoleRow> find_poles(const RunConfig& c);

/// Highest-lying pole enclosed by `contour` for potential p: the physical
/// state followed through the diagonalization. Throws SearchFailure if the
/// region holds no pole.
BerggrenState physical_pole(const PotentialParams& p, const PartialWave& pw,
                            const RadialGrid& grid, const ContourSpec& contour);

struct CaseResult {
  std::string wave;
  Scheme scheme = Scheme::offdiag;
  int n_gl = 0;
  double E = 0.0;
  double Gamma = 0.0;
  double E_exact = 0.0;
  double Gamma_exact = 0.0;
  double rms_re = 0.0;
  double rms_im = 0.0;
  double pole_weight = 0.0;
  double seconds = 0.0;
  std::string status = "ok";  // "ok", "ambiguous: ..." or "error: ..."
};

/// Builds the basis, assembles the kernel and solves one case. Numerical
/// errors propagate.
CaseResult run_case(const RunConfig& c, const PartialWave& pw, Scheme scheme, int n_gl);

/// Basis of one case, as serialized by the `basis` command.
DiscretizedBasis build_case_basis(const RunConfig& c, const PartialWave& pw, Scheme scheme,
                                  int n_gl);

/// Pole table: "wave,hamiltonian,Z,kind,E,Gamma".
void write_poles_csv(const std::vector<PoleRow>& rows, std::ostream& out, int digits);

/// Sweep over waves, schemes and N_GL with header
/// "wave,scheme,n_gl,E,Gamma,rms_re,rms_im,pole_weight,status"; each wave
/// starts with its "exact" row. Failing cells are reported in the status
/// column and the sweep continues.
void write_table_csv(const RunConfig& c, std::ostream& out);

/// Rows of a sweep restricted to the wave functions:
/// "wave,scheme,n_gl,rms_re,rms_im,status".
void write_rms_csv(const RunConfig& c, std::ostream& out);

}  // namespace berggren

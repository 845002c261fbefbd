#pragma once

// Discretized Berggren basis: the poles lying between the real k axis and a
// complex contour, plus scattering states at Gauss-Legendre nodes of that
// contour.

#include <iosfwd>
#include <vector>

#include "berggren/potential.hpp"
#include "berggren/quadrature.hpp"
#include "berggren/radial.hpp"

namespace berggren {

/// Polyline in the complex k plane, first vertex k_min and last k_max, both
/// real. Segment s carries n_per_segment[s] Gauss-Legendre nodes.
struct ContourSpec {
  std::vector<cplx> vertices;
  std::vector<int> n_per_segment;

  int segments() const { return static_cast<int>(vertices.size()) - 1; }
  int total_nodes() const;
  cplx k_min() const { return vertices.front(); }
  cplx k_max() const { return vertices.back(); }

  /// Throws ConfigurationError on malformed input.
  void validate() const;
};

/// Default contour for a partial wave with n_gl nodes split evenly over the
/// three segments: {k_min, 0.25-0.1i, 1, 4} for s1/2 and d5/2 and
/// {k_min, 0.4-0.39i, 1, 4} for d3/2. n_gl must be a multiple of 3.
ContourSpec default_contour(const PartialWave& pw, double k_min, int n_gl);

/// Nodes and complex weights of every segment, in contour order.
ComplexRule gauss_legendre_on_contour(const ContourSpec& spec);

/// |F(k R)| + |k F'(k R)| with eta taken at the basis charge.
double kmin_condition(double k, const PotentialParams& p, const PartialWave& pw, double R);

/// Root of kmin_condition = target on (0, 0.3] by bisection.
double resolve_kmin(const PotentialParams& p, const PartialWave& pw, double R,
                    double target = 1e-5);

/// True if k lies strictly between the real axis and the contour polyline.
bool below_contour(cplx k, const ContourSpec& spec);

/// Poles found by the argument-principle scan and refined, keeping bound
/// states and the resonances enclosed by the contour. Sorted by Re(e).
std::vector<BerggrenState> basis_poles(const PotentialParams& p, const PartialWave& pw,
                                       const RadialGrid& grid, const ContourSpec& spec);

struct DiscretizedBasis {
  std::vector<BerggrenState> states;  // discrete first, then contour order
  int n_res = 0;
  ContourSpec contour;
  PotentialParams potential;
  PartialWave pw;
  RadialGrid grid;

  int size() const { return static_cast<int>(states.size()); }
  int n_scattering() const { return size() - n_res; }
};

/// Assembles the basis. Scattering states are Dirac-normalized with the
/// quadrature weight stored in BerggrenState::w (the wave function itself
/// is not multiplied by sqrt(w)). A NearPoleError from a node is rethrown
/// with the node index attached.
DiscretizedBasis build_basis(const ContourSpec& spec, std::vector<BerggrenState> poles,
                             const PotentialParams& p, const PartialWave& pw,
                             const RadialGrid& grid);

/// Convenience: default contour, resolved k_min and scanned poles.
DiscretizedBasis build_default_basis(const PotentialParams& p, const PartialWave& pw, int n_gl,
                                     const RadialGrid& grid = RadialGrid::make());

// -- Snapshots ----------------------------------------------------------------
//
// JSON document, format tag "berggren-basis", version 1. Complex numbers are
// stored as [re, im] pairs. Fields: potential, wave, grid (R, n_nodes,
// n_probe), contour (vertices, n_per_segment), n_res and states (kind, k, e,
// eta, w, C_plus, C_minus, scale, negligible, u_R, du_R, u_interior,
// u_probe). Doubles are written with round-trip precision.

inline constexpr int kSnapshotVersion = 1;

void write_snapshot(const DiscretizedBasis& basis, std::ostream& out);

/// Throws ConfigurationError on a malformed document or version mismatch.
DiscretizedBasis read_snapshot(std::istream& in);

}  // namespace berggren

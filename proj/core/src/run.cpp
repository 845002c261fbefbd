#include "berggren/run.hpp"

#include <chrono>
#include <ostream>

#include "berggren/errors.hpp"
#include "berggren/format.hpp"

namespace berggren {

namespace {

// CSV cells never contain commas or line breaks.
std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

CaseResult solve_case(const RunConfig& c, const PartialWave& pw, Scheme scheme, int n_gl,
                      const BerggrenState* known_exact) {
  const auto start = std::chrono::steady_clock::now();
  CaseResult r;
  r.wave = wave_tag(pw);
  r.scheme = scheme;
  r.n_gl = n_gl;
  const DiscretizedBasis basis = build_case_basis(c, pw, scheme, n_gl);
  const BerggrenState exact = known_exact ? *known_exact
                                          : physical_pole(diag_potential(c), pw, basis.grid,
                                                          basis.contour);
  const ResidualCoulomb v = ResidualCoulomb::between(basis.potential, c.Z_diag);
  const KernelMatrix kernel = assemble(scheme, basis, v, kernel_options(c, pw));
  const DiagResult d = solve(basis, kernel, basis.n_res - 1, exact);
  r.E = d.E;
  r.Gamma = d.Gamma;
  r.E_exact = exact.e.real();
  r.Gamma_exact = exact.width_keV();
  r.rms_re = d.rms_re;
  r.rms_im = d.rms_im;
  r.pole_weight = d.pole_weight;
  if (!d.warning.empty()) r.status = sanitize(d.warning);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// Exact pole of the diagonalized Hamiltonian, searched inside the contour of
// the first scheme; null with `error` set on failure.
std::optional<BerggrenState> exact_for_wave(const RunConfig& c, const PartialWave& pw,
                                            std::string& error) {
  try {
    const double k_min = contour_kmin(c, pw, Scheme::offdiag);
    const ContourSpec contour = make_contour(c, pw, k_min, c.n_gl.front());
    return physical_pole(diag_potential(c), pw, make_grid(c), contour);
  } catch (const Error& e) {
    error = sanitize(e.what());
    return std::nullopt;
  }
}

template <typename RowWriter>
void sweep(const RunConfig& c, std::ostream& out, RowWriter&& row) {
  for (const PartialWave& pw : c.waves) {
    std::string error;
    const std::optional<BerggrenState> exact = exact_for_wave(c, pw, error);
    row(pw, nullptr, exact ? &*exact : nullptr, error);
    for (Scheme scheme : c.schemes) {
      for (int n : c.n_gl) {
        CaseResult r;
        r.wave = wave_tag(pw);
        r.scheme = scheme;
        r.n_gl = n;
        try {
          r = solve_case(c, pw, scheme, n, exact ? &*exact : nullptr);
        } catch (const Error& e) {
          r.status = "error: " + sanitize(e.what());
        }
        row(pw, &r, nullptr, {});
      }
    }
  }
  out.flush();
}

}  // namespace

PotentialParams basis_potential(const RunConfig& c) { return c.potential; }

PotentialParams diag_potential(const RunConfig& c) {
  PotentialParams p = c.potential;
  p.Z_c = c.Z_diag;
  return p;
}

RadialGrid make_grid(const RunConfig& c) {
  return RadialGrid::make(c.grid.R, c.grid.n_nodes, c.grid.n_probe);
}

double contour_kmin(const RunConfig& c, const PartialWave& pw, Scheme scheme) {
  if (scheme == Scheme::cut && c.contour.cut_from_origin) return 0.0;
  if (c.contour.k_min) return *c.contour.k_min;
  return resolve_kmin(basis_potential(c), pw, c.grid.R, c.contour.kmin_target);
}

ContourSpec make_contour(const RunConfig& c, const PartialWave& pw, double k_min, int n_gl) {
  const auto it = c.contour.vertices.find(wave_tag(pw));
  if (it == c.contour.vertices.end()) return default_contour(pw, k_min, n_gl);
  ContourSpec spec;
  spec.vertices.push_back(k_min);
  spec.vertices.insert(spec.vertices.end(), it->second.begin(), it->second.end());
  const int segments = spec.segments();
  if (n_gl % segments != 0) {
    throw ConfigurationError("n_gl must be a multiple of the number of contour segments");
  }
  spec.n_per_segment.assign(segments, n_gl / segments);
  spec.validate();
  return spec;
}

KernelOptions kernel_options(const RunConfig& c, const PartialWave& pw) {
  KernelOptions o;
  o.policy = c.rotation;
  o.R_cut = c.cut.R_cut ? *c.cut.R_cut : default_cut_radius(pw);
  o.cut_panel = c.cut.panel;
  o.cut_nodes_per_panel = c.cut.nodes_per_panel;
  return o;
}

BerggrenState physical_pole(const PotentialParams& p, const PartialWave& pw,
                            const RadialGrid& grid, const ContourSpec& contour) {
  std::vector<BerggrenState> poles = basis_poles(p, pw, grid, contour);
  if (poles.empty()) {
    throw SearchFailure("no pole enclosed by the contour for " + pw.label() + " at Z = " +
                        format_number(p.Z_c));
  }
  return poles.back();
}

std::vector<PoleRow> find_poles(const RunConfig& c) {
  std::vector<PoleRow> rows;
  const RadialGrid grid = make_grid(c);
  for (const PartialWave& pw : c.waves) {
    const double k_min = contour_kmin(c, pw, Scheme::offdiag);
    const ContourSpec contour = make_contour(c, pw, k_min, c.n_gl.front());
    for (const char* which : {"basis", "diag"}) {
      const PotentialParams p =
          std::string(which) == "basis" ? basis_potential(c) : diag_potential(c);
      const std::vector<BerggrenState> poles = basis_poles(p, pw, grid, contour);
      if (poles.empty()) {
        throw SearchFailure("no pole enclosed by the contour for " + pw.label() + " (" + which +
                            ")");
      }
      for (const BerggrenState& s : poles) {
        rows.push_back({wave_tag(pw), which, p.Z_c, s.kind, s.k, s.e.real(), s.width_keV()});
      }
    }
  }
  return rows;
}

DiscretizedBasis build_case_basis(const RunConfig& c, const PartialWave& pw, Scheme scheme,
                                  int n_gl) {
  const PotentialParams p = basis_potential(c);
  const RadialGrid grid = make_grid(c);
  const ContourSpec contour = make_contour(c, pw, contour_kmin(c, pw, scheme), n_gl);
  DiscretizedBasis basis = build_basis(contour, basis_poles(p, pw, grid, contour), p, pw, grid);
  if (basis.n_res == 0) {
    throw SearchFailure("basis for " + pw.label() + " holds no pole to follow");
  }
  return basis;
}

CaseResult run_case(const RunConfig& c, const PartialWave& pw, Scheme scheme, int n_gl) {
  return solve_case(c, pw, scheme, n_gl, nullptr);
}

void write_poles_csv(const std::vector<PoleRow>& rows, std::ostream& out, int digits) {
  out << "wave,hamiltonian,Z,kind,E,Gamma\n";
  for (const PoleRow& r : rows) {
    out << r.wave << ',' << r.hamiltonian << ',' << format_number(r.Z) << ','
        << to_string(r.kind) << ',' << format_number(r.E, digits) << ','
        << format_number(r.Gamma, digits) << '\n';
  }
}

void write_table_csv(const RunConfig& c, std::ostream& out) {
  const int digits = c.output.digits;
  out << "wave,scheme,n_gl,E,Gamma,rms_re,rms_im,pole_weight,status\n";
  sweep(c, out, [&](const PartialWave& pw, const CaseResult* r, const BerggrenState* exact,
                    const std::string& error) {
    if (r == nullptr) {
      out << wave_tag(pw) << ",exact,,";
      if (exact) {
        out << format_number(exact->e.real(), digits) << ','
            << format_number(exact->width_keV(), digits) << ",,,,ok\n";
      } else {
        out << ",,,,,error: " << error << '\n';
      }
      return;
    }
    out << r->wave << ',' << to_string(r->scheme) << ',' << r->n_gl << ',';
    if (r->status.starts_with("error")) {
      out << ",,,,," << r->status << '\n';
      return;
    }
    out << format_number(r->E, digits) << ',' << format_number(r->Gamma, digits) << ','
        << format_number(r->rms_re, digits) << ',' << format_number(r->rms_im, digits) << ','
        << format_number(r->pole_weight, digits) << ',' << r->status << '\n';
  });
}

void write_rms_csv(const RunConfig& c, std::ostream& out) {
  const int digits = c.output.digits;
  out << "wave,scheme,n_gl,rms_re,rms_im,status\n";
  sweep(c, out, [&](const PartialWave&, const CaseResult* r, const BerggrenState*,
                    const std::string&) {
    if (r == nullptr) return;
    out << r->wave << ',' << to_string(r->scheme) << ',' << r->n_gl << ',';
    if (r->status.starts_with("error")) {
      out << ",," << r->status << '\n';
      return;
    }
    out << format_number(r->rms_re, digits) << ',' << format_number(r->rms_im, digits) << ','
        << r->status << '\n';
  });
}

}  // namespace berggren

// Command-line front end: pole tables, basis snapshots, single
// diagonalizations, N_GL sweeps, the quadrature study and rms tables.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "berggren/config.hpp"
#include "berggren/errors.hpp"
#include "berggren/format.hpp"
#include "berggren/quadstudy.hpp"
#include "berggren/run.hpp"

namespace {

using namespace berggren;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string config_path;
  std::vector<std::string> schemes;
  std::vector<std::string> waves;
  std::vector<int> n_gl;
  std::string out;
  std::optional<int> digits;
  bool echo_config = false;
  bool error_json = false;
};

RunConfig effective_config(const Flags& f) {
  RunConfig c = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
  if (!f.schemes.empty()) {
    c.schemes.clear();
    for (const auto& s : f.schemes) c.schemes.push_back(scheme_from_string(s));
  }
  if (!f.waves.empty()) {
    c.waves.clear();
    for (const auto& w : f.waves) c.waves.push_back(wave_from_string(w));
  }
  if (!f.n_gl.empty()) c.n_gl = f.n_gl;
  if (!f.out.empty()) c.output.path = f.out;
  if (f.digits) c.output.digits = *f.digits;
  c.validate();
  return c;
}

// Destination chosen by output.path, standard output when empty.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw ConfigurationError("cannot open output file " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// diag and basis act on one case: a single entry of each list.
struct SingleCase {
  PartialWave pw;
  Scheme scheme;
  int n_gl;
};

SingleCase single_case(const Flags& f, const RunConfig& c) {
  auto one = [](std::size_t n, const char* what) {
    if (n > 1) throw ConfigurationError(std::string("this command takes a single ") + what);
  };
  one(f.waves.size(), "--wave");
  one(f.schemes.size(), "--scheme");
  one(f.n_gl.size(), "--ngl");
  SingleCase s{PartialWave{0, 1}, Scheme::offdiag, 120};
  if (!f.waves.empty()) s.pw = c.waves.front();
  if (!f.schemes.empty()) s.scheme = c.schemes.front();
  if (!f.n_gl.empty()) s.n_gl = c.n_gl.front();
  // The defaults must satisfy the same constraints as configured values.
  RunConfig probe = c;
  probe.waves = {s.pw};
  probe.n_gl = {s.n_gl};
  probe.validate();
  return s;
}

void cmd_diag(const Flags& f, const RunConfig& c) {
  const SingleCase s = single_case(f, c);
  const CaseResult r = run_case(c, s.pw, s.scheme, s.n_gl);
  const int d = c.output.digits;
  Sink sink(c.output.path);
  std::ostream& out = sink.stream();
  out << "wave,scheme,n_gl,E,Gamma,E_exact,Gamma_exact,dE,dGamma,rms_re,rms_im,pole_weight,status\n";
  out << r.wave << ',' << to_string(r.scheme) << ',' << r.n_gl << ',' << format_number(r.E, d)
      << ',' << format_number(r.Gamma, d) << ',' << format_number(r.E_exact, d) << ','
      << format_number(r.Gamma_exact, d) << ',' << format_number(r.E - r.E_exact, d) << ','
      << format_number(r.Gamma - r.Gamma_exact, d) << ',' << format_number(r.rms_re, d) << ','
      << format_number(r.rms_im, d) << ',' << format_number(r.pole_weight, d) << ','
      << r.status << '\n';
}

void cmd_basis(const Flags& f, const RunConfig& c) {
  const SingleCase s = single_case(f, c);
  const DiscretizedBasis basis = build_case_basis(c, s.pw, s.scheme, s.n_gl);
  Sink sink(c.output.path);
  write_snapshot(basis, sink.stream());
}

void cmd_poles(const RunConfig& c) {
  const std::vector<PoleRow> rows = find_poles(c);
  Sink sink(c.output.path);
  // Pole tables default to six significant digits.
  write_poles_csv(rows, sink.stream(), c.output.digits > 0 ? c.output.digits : 6);
}

void cmd_quadstudy(const RunConfig& c) {
  const std::vector<StudyConfig> sweep = c.quadstudy.sweep(c.potential, c.Z_diag);
  if (sweep.empty()) throw ConfigurationError("quadstudy: empty sweep");
  Sink sink(c.output.path);
  write_study_csv(sweep, sink.stream(), c.output.digits);
}

void report(const Flags& f, const char* kind, const std::string& message) {
  if (f.error_json) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
  } else {
    std::cerr << "berggren: " << message << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Berggren-basis diagonalization with long-range residual Coulomb kernels"};
  app.require_subcommand(0, 1);
  Flags f;
  app.add_option("--config", f.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--scheme", f.schemes, "cut|sub|offdiag (comma separated)")->delimiter(',');
  app.add_option("--wave", f.waves, "s12|d52|d32 (comma separated)")->delimiter(',');
  app.add_option("--ngl", f.n_gl, "contour node counts (comma separated)")->delimiter(',');
  app.add_option("--out", f.out, "output file, standard output when absent");
  app.add_option("--digits", f.digits, "significant digits, 0 for shortest round-trip")
      ->check(CLI::Range(0, 17));
  app.add_flag("--echo-config", f.echo_config, "print the effective configuration and exit");
  app.add_flag("--error-json", f.error_json, "report errors as JSON on standard error");

  auto* poles = app.add_subcommand("poles", "energies and widths of both Hamiltonians");
  auto* basis = app.add_subcommand("basis", "build one basis and write its JSON snapshot");
  auto* diag = app.add_subcommand("diag", "diagonalize a single case");
  auto* table = app.add_subcommand("table", "sweep of schemes and N_GL with exact rows");
  auto* quadstudy = app.add_subcommand("quadstudy", "quadrature study of the shifted diagonal");
  auto* rms = app.add_subcommand("rms", "wave-function rms deviations per scheme and N_GL");
  for (auto* sub : {poles, basis, diag, table, quadstudy, rms}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const RunConfig config = effective_config(f);
    if (f.echo_config) {
      std::cout << to_json_text(config);
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kExitConfig;
    }
    if (*poles) cmd_poles(config);
    if (*basis) cmd_basis(f, config);
    if (*diag) cmd_diag(f, config);
    if (*table) {
      Sink sink(config.output.path);
      write_table_csv(config, sink.stream());
    }
    if (*quadstudy) cmd_quadstudy(config);
    if (*rms) {
      Sink sink(config.output.path);
      write_rms_csv(config, sink.stream());
    }
  } catch (const ConfigurationError& e) {
    report(f, "configuration", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    report(f, "numerical", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    report(f, "internal", e.what());
    return kExitNumerical;
  }
  return 0;
}

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "berggren/basis.hpp"
#include "berggren/errors.hpp"

namespace berggren {

namespace {

using nlohmann::json;

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigurationError("snapshot: expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (const cplx& z : v) out.push_back(to_json(z));
  return out;
}

std::vector<cplx> complex_list(const json& j) {
  std::vector<cplx> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(complex_from(e));
  return out;
}

StateKind kind_from(const std::string& s) {
  if (s == "bound") return StateKind::bound;
  if (s == "resonant") return StateKind::resonant;
  if (s == "scattering") return StateKind::scattering;
  throw ConfigurationError("snapshot: unknown state kind '" + s + "'");
}

}  // namespace

void write_snapshot(const DiscretizedBasis& basis, std::ostream& out) {
  const PotentialParams& p = basis.potential;
  json doc;
  doc["format"] = "berggren-basis";
  doc["version"] = kSnapshotVersion;
  doc["potential"] = {{"V_o", p.V_o},     {"V_so", p.V_so}, {"R_0", p.R_0},
                      {"d", p.d},         {"alpha", p.alpha}, {"Z_c", p.Z_c},
                      {"C_c", p.C_c},     {"hbar2_over_2m", p.hbar2_over_2m}};
  doc["wave"] = {{"ell", basis.pw.ell}, {"two_j", basis.pw.two_j}};
  doc["grid"] = {{"R", basis.grid.R},
                 {"n_nodes", basis.grid.nodes.size()},
                 {"n_probe", basis.grid.probe.size()}};
  doc["contour"] = {{"vertices", to_json(basis.contour.vertices)},
                    {"n_per_segment", basis.contour.n_per_segment}};
  doc["n_res"] = basis.n_res;
  json states = json::array();
  for (const BerggrenState& s : basis.states) {
    states.push_back({{"kind", to_string(s.kind)},
                      {"k", to_json(s.k)},
                      {"e", to_json(s.e)},
                      {"eta", to_json(s.eta)},
                      {"w", to_json(s.w)},
                      {"C_plus", to_json(s.C_plus)},
                      {"C_minus", to_json(s.C_minus)},
                      {"scale", to_json(s.scale)},
                      {"negligible", s.negligible},
                      {"u_R", to_json(s.u_R)},
                      {"du_R", to_json(s.du_R)},
                      {"u_interior", to_json(s.u_interior)},
                      {"u_probe", to_json(s.u_probe)}});
  }
  doc["states"] = std::move(states);
  // dump() prints doubles with round-trip precision.
  out << doc.dump() << '\n';
}

DiscretizedBasis read_snapshot(std::istream& in) {
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("snapshot: parse error: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "berggren-basis") {
      throw ConfigurationError("snapshot: not a basis snapshot");
    }
    const int version = doc.at("version").get<int>();
    if (version != kSnapshotVersion) {
      throw ConfigurationError("snapshot: unsupported version " + std::to_string(version));
    }
    DiscretizedBasis b;
    const json& p = doc.at("potential");
    b.potential.V_o = p.at("V_o").get<double>();
    b.potential.V_so = p.at("V_so").get<double>();
    b.potential.R_0 = p.at("R_0").get<double>();
    b.potential.d = p.at("d").get<double>();
    b.potential.alpha = p.at("alpha").get<double>();
    b.potential.Z_c = p.at("Z_c").get<double>();
    b.potential.C_c = p.at("C_c").get<double>();
    b.potential.hbar2_over_2m = p.at("hbar2_over_2m").get<double>();
    b.potential.validate();
    b.pw = PartialWave::make(doc.at("wave").at("ell").get<int>(),
                             doc.at("wave").at("two_j").get<int>());
    const json& g = doc.at("grid");
    b.grid = RadialGrid::make(g.at("R").get<double>(), g.at("n_nodes").get<int>(),
                              g.at("n_probe").get<int>());
    b.contour.vertices = complex_list(doc.at("contour").at("vertices"));
    b.contour.n_per_segment = doc.at("contour").at("n_per_segment").get<std::vector<int>>();
    b.contour.validate();
    b.n_res = doc.at("n_res").get<int>();
    for (const json& js : doc.at("states")) {
      BerggrenState s;
      s.kind = kind_from(js.at("kind").get<std::string>());
      s.pw = b.pw;
      s.R = b.grid.R;
      s.k = complex_from(js.at("k"));
      s.e = complex_from(js.at("e"));
      s.eta = complex_from(js.at("eta"));
      s.w = complex_from(js.at("w"));
      s.C_plus = complex_from(js.at("C_plus"));
      s.C_minus = complex_from(js.at("C_minus"));
      s.scale = complex_from(js.at("scale"));
      s.negligible = js.at("negligible").get<bool>();
      s.u_R = complex_from(js.at("u_R"));
      s.du_R = complex_from(js.at("du_R"));
      s.u_interior = complex_list(js.at("u_interior"));
      s.u_probe = complex_list(js.at("u_probe"));
      if (s.u_interior.size() != b.grid.nodes.size() || s.u_probe.size() != b.grid.probe.size()) {
        throw ConfigurationError("snapshot: sample count does not match the grid");
      }
      b.states.push_back(std::move(s));
    }
    if (b.n_res < 0 || b.n_res > b.size() ||
        b.n_scattering() != b.contour.total_nodes()) {
      throw ConfigurationError("snapshot: state counts do not match the contour");
    }
    return b;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("snapshot: malformed document: ") + e.what());
  }
}

}  // namespace berggren

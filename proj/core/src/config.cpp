#include "berggren/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "berggren/errors.hpp"

namespace berggren {

namespace {

using nlohmann::json;

constexpr std::string_view kLetters = "spdfghik";

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigurationError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigurationError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

void read_optional(const json& j, const char* key, std::optional<double>& target) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    target.reset();
  } else {
    target = j.at(key).get<double>();
  }
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

cplx complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigurationError("contour vertex: expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

void parse_potential(const json& j, RunConfig& c) {
  check_keys(j, {"V_o", "V_so", "R_0", "d", "alpha", "C_c", "hbar2_over_2m", "Z_basis", "Z_diag"},
             "potential");
  PotentialParams& p = c.potential;
  read(j, "V_o", p.V_o);
  read(j, "V_so", p.V_so);
  read(j, "R_0", p.R_0);
  read(j, "d", p.d);
  p.alpha = 3.0 * std::sqrt(std::numbers::pi) / (4.0 * p.R_0);
  read(j, "alpha", p.alpha);
  read(j, "C_c", p.C_c);
  read(j, "hbar2_over_2m", p.hbar2_over_2m);
  read(j, "Z_basis", p.Z_c);
  read(j, "Z_diag", c.Z_diag);
}

void parse_contour(const json& j, ContourConfig& c) {
  check_keys(j, {"k_min", "kmin_target", "cut_from_origin", "vertices"}, "contour");
  read_optional(j, "k_min", c.k_min);
  read(j, "kmin_target", c.kmin_target);
  read(j, "cut_from_origin", c.cut_from_origin);
  if (j.contains("vertices")) {
    c.vertices.clear();
    const json& v = j.at("vertices");
    if (!v.is_object()) throw ConfigurationError("contour.vertices: expected an object");
    for (const auto& item : v.items()) {
      wave_from_string(item.key());
      std::vector<cplx> list;
      for (const auto& z : item.value()) list.push_back(complex_from(z));
      c.vertices[item.key()] = std::move(list);
    }
  }
}

void parse_quadstudy(const json& j, QuadstudyConfig& q) {
  check_keys(j, {"alphas", "k_max", "n_gl", "radial_nodes", "radial_R"}, "quadstudy");
  if (j.contains("alphas")) {
    q.alphas.clear();
    for (const auto& a : j.at("alphas")) {
      if (a.is_string()) {
        if (a.get<std::string>() != "point") {
          throw ConfigurationError("quadstudy.alphas: strings other than \"point\" are invalid");
        }
        q.alphas.emplace_back(std::nullopt);
      } else {
        q.alphas.emplace_back(a.get<double>());
      }
    }
  }
  read(j, "k_max", q.k_max);
  read(j, "n_gl", q.n_gl);
  read(j, "radial_nodes", q.radial_nodes);
  read(j, "radial_R", q.radial_R);
}

RunConfig from_json(const json& doc) {
  check_keys(doc,
             {"schema_version", "potential", "waves", "schemes", "n_gl", "contour", "grid",
              "rotation", "cut", "quadstudy", "output"},
             "config");
  RunConfig c;
  if (!doc.contains("schema_version")) throw ConfigurationError("config: schema_version missing");
  c.schema_version = doc.at("schema_version").get<int>();
  if (c.schema_version != kConfigSchemaVersion) {
    throw ConfigurationError("config: unsupported schema_version " +
                             std::to_string(c.schema_version));
  }
  if (doc.contains("potential")) parse_potential(doc.at("potential"), c);
  if (doc.contains("waves")) {
    c.waves.clear();
    for (const auto& w : doc.at("waves")) c.waves.push_back(wave_from_string(w.get<std::string>()));
  }
  if (doc.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : doc.at("schemes")) c.schemes.push_back(scheme_from_string(s.get<std::string>()));
  }
  read(doc, "n_gl", c.n_gl);
  if (doc.contains("contour")) parse_contour(doc.at("contour"), c.contour);
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    check_keys(g, {"R", "n_nodes", "n_probe"}, "grid");
    read(g, "R", c.grid.R);
    read(g, "n_nodes", c.grid.n_nodes);
    read(g, "n_probe", c.grid.n_probe);
  }
  if (doc.contains("rotation")) {
    const json& r = doc.at("rotation");
    check_keys(r, {"R", "panel_threshold"}, "rotation");
    read(r, "R", c.rotation.R);
    read(r, "panel_threshold", c.rotation.panel_threshold);
  }
  if (doc.contains("cut")) {
    const json& k = doc.at("cut");
    check_keys(k, {"R_cut", "panel", "nodes_per_panel"}, "cut");
    read_optional(k, "R_cut", c.cut.R_cut);
    read(k, "panel", c.cut.panel);
    read(k, "nodes_per_panel", c.cut.nodes_per_panel);
  }
  if (doc.contains("quadstudy")) parse_quadstudy(doc.at("quadstudy"), c.quadstudy);
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    check_keys(o, {"path", "digits"}, "output");
    read(o, "path", c.output.path);
    read(o, "digits", c.output.digits);
  }
  c.validate();
  return c;
}

}  // namespace

PartialWave wave_from_string(std::string_view tag) {
  const auto bad = [&] { return ConfigurationError("unknown partial wave '" + std::string(tag) + "'"); };
  if (tag.size() < 3 || tag.back() != '2') throw bad();
  const auto ell = kLetters.find(tag.front());
  if (ell == std::string_view::npos) throw bad();
  int two_j = 0;
  for (char ch : tag.substr(1, tag.size() - 2)) {
    if (ch < '0' || ch > '9') throw bad();
    two_j = 10 * two_j + (ch - '0');
  }
  return PartialWave::make(static_cast<int>(ell), two_j);
}

std::string wave_tag(const PartialWave& pw) {
  const char letter = pw.ell < static_cast<int>(kLetters.size()) ? kLetters[pw.ell] : '?';
  return std::string(1, letter) + std::to_string(pw.two_j) + "2";
}

std::vector<StudyConfig> QuadstudyConfig::sweep(const PotentialParams& p, double Z_diag) const {
  std::vector<StudyConfig> out;
  for (const auto& a : alphas) {
    for (double km : k_max) {
      for (int n : n_gl) {
        StudyConfig s;
        s.alpha = a;
        s.k_max = km;
        s.n_gl = n;
        s.radial_nodes = radial_nodes;
        s.radial_R = radial_R;
        s.delta_Z = Z_diag - p.Z_c;
        s.C_c = p.C_c;
        out.push_back(s);
      }
    }
  }
  return out;
}

void RunConfig::validate() const {
  potential.validate();
  if (waves.empty()) throw ConfigurationError("config: waves must not be empty");
  if (schemes.empty()) throw ConfigurationError("config: schemes must not be empty");
  if (n_gl.empty()) throw ConfigurationError("config: n_gl must not be empty");
  std::set<std::string> seen;
  for (const auto& w : waves) {
    if (!seen.insert(wave_tag(w)).second) {
      throw ConfigurationError("config: wave " + wave_tag(w) + " listed twice");
    }
  }
  for (const auto& [tag, vertices] : contour.vertices) {
    if (vertices.size() < 2) throw ConfigurationError("contour.vertices." + tag + ": too few vertices");
    if (vertices.back().imag() != 0.0 || !(vertices.back().real() > 0.0)) {
      throw ConfigurationError("contour.vertices." + tag + ": the last vertex must be real");
    }
  }
  for (const auto& w : waves) {
    const auto it = contour.vertices.find(wave_tag(w));
    const int segments = it == contour.vertices.end() ? 3 : static_cast<int>(it->second.size());
    for (int n : n_gl) {
      if (n <= 0 || n % segments != 0) {
        throw ConfigurationError("config: n_gl = " + std::to_string(n) + " is not a positive multiple of " +
                                 std::to_string(segments) + " for " + wave_tag(w));
      }
    }
  }
  if (contour.k_min && !(*contour.k_min >= 0.0)) throw ConfigurationError("contour.k_min must be >= 0");
  if (!(contour.kmin_target > 0.0)) throw ConfigurationError("contour.kmin_target must be positive");
  if (!(grid.R > 0.0) || grid.n_nodes < 2 || grid.n_probe < 2) {
    throw ConfigurationError("grid: R must be positive and node counts at least 2");
  }
  if (rotation.R < grid.R) throw ConfigurationError("rotation.R must not be below grid.R");
  if (!(rotation.panel_threshold > 0.0)) throw ConfigurationError("rotation.panel_threshold must be positive");
  if (cut.R_cut && *cut.R_cut < grid.R) throw ConfigurationError("cut.R_cut must not be below grid.R");
  if (!(cut.panel > 0.0) || cut.nodes_per_panel < 1) throw ConfigurationError("cut: invalid panel layout");
  if (quadstudy.alphas.empty() || quadstudy.k_max.empty() || quadstudy.n_gl.empty()) {
    throw ConfigurationError("quadstudy: sweep lists must not be empty");
  }
  for (const auto& s : quadstudy.sweep(potential, Z_diag)) s.validate();
  if (output.digits < 0 || output.digits > 17) throw ConfigurationError("output.digits must be in [0, 17]");
}

RunConfig parse_config(std::string_view json_text) {
  try {
    return from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_json_text(const RunConfig& c) {
  const PotentialParams& p = c.potential;
  json doc;
  doc["schema_version"] = c.schema_version;
  doc["potential"] = {{"V_o", p.V_o},         {"V_so", p.V_so},
                      {"R_0", p.R_0},         {"d", p.d},
                      {"alpha", p.alpha},     {"C_c", p.C_c},
                      {"hbar2_over_2m", p.hbar2_over_2m},
                      {"Z_basis", p.Z_c},     {"Z_diag", c.Z_diag}};
  json waves = json::array();
  for (const auto& w : c.waves) waves.push_back(wave_tag(w));
  doc["waves"] = waves;
  json schemes = json::array();
  for (Scheme s : c.schemes) schemes.push_back(to_string(s));
  doc["schemes"] = schemes;
  doc["n_gl"] = c.n_gl;
  json vertices = json::object();
  for (const auto& [tag, list] : c.contour.vertices) {
    json arr = json::array();
    for (const cplx& z : list) arr.push_back(json::array({z.real(), z.imag()}));
    vertices[tag] = arr;
  }
  doc["contour"] = {{"k_min", optional_json(c.contour.k_min)},
                    {"kmin_target", c.contour.kmin_target},
                    {"cut_from_origin", c.contour.cut_from_origin},
                    {"vertices", vertices}};
  doc["grid"] = {{"R", c.grid.R}, {"n_nodes", c.grid.n_nodes}, {"n_probe", c.grid.n_probe}};
  doc["rotation"] = {{"R", c.rotation.R}, {"panel_threshold", c.rotation.panel_threshold}};
  doc["cut"] = {{"R_cut", optional_json(c.cut.R_cut)},
                {"panel", c.cut.panel},
                {"nodes_per_panel", c.cut.nodes_per_panel}};
  json alphas = json::array();
  for (const auto& a : c.quadstudy.alphas) alphas.push_back(a ? json(*a) : json("point"));
  doc["quadstudy"] = {{"alphas", alphas},
                      {"k_max", c.quadstudy.k_max},
                      {"n_gl", c.quadstudy.n_gl},
                      {"radial_nodes", c.quadstudy.radial_nodes},
                      {"radial_R", c.quadstudy.radial_R}};
  doc["output"] = {{"path", c.output.path}, {"digits", c.output.digits}};
  return doc.dump(2) + "\n";
}

}  // namespace berggren

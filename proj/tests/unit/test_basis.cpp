#include <doctest.h>

#include <cmath>
#include <sstream>

#include "berggren/basis.hpp"
#include "berggren/errors.hpp"
#include "berggren/exterior.hpp"
#include "testing.hpp"

using namespace berggren;
using berggren::testing::rel_diff;

namespace {

const DiscretizedBasis& s_basis(int n_gl) {
  static const DiscretizedBasis b45 =
      build_default_basis(PotentialParams{}, PartialWave::make(0, 1), 45);
  static const DiscretizedBasis b120 =
      build_default_basis(PotentialParams{}, PartialWave::make(0, 1), 120);
  return n_gl == 45 ? b45 : b120;
}

// Berggren overlap of two states: interior quadrature plus the rotated
// exterior integral of every outgoing/incoming product.
cplx overlap(const BerggrenState& a, const BerggrenState& b, const RadialGrid& grid) {
  cplx sum = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    sum += grid.weights[i] * a.u_interior[i] * b.u_interior[i];
  }
  const RotationPolicy policy;
  const RayLayout layout = RayLayout::make();
  StateRays ra(a, layout);
  StateRays rb(b, layout);
  for (Sign wa : {Sign::plus, Sign::minus}) {
    for (Sign wb : {Sign::plus, Sign::minus}) {
      sum += ray_pair_integral(ra, wa, rb, wb, policy, layout, 0);
    }
  }
  return sum;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules on complex segments") {
  ContourSpec spec;
  spec.vertices = {0.1, cplx{0.25, -0.1}, 1.0, 4.0};
  spec.n_per_segment = {15, 15, 15};
  const ComplexRule rule = gauss_legendre_on_contour(spec);
  REQUIRE(rule.nodes.size() == 45);
  for (int s = 0; s < 3; ++s) {
    const cplx a = spec.vertices[s];
    const cplx b = spec.vertices[s + 1];
    cplx w = 0.0;
    cplx wk = 0.0;
    cplx poly = 0.0;
    for (int i = 15 * s; i < 15 * (s + 1); ++i) {
      w += rule.weights[i];
      wk += rule.weights[i] * rule.nodes[i];
      poly += rule.weights[i] * std::pow(rule.nodes[i], 29);
    }
    CHECK(rel_diff(w, b - a) < 1e-14);
    CHECK(rel_diff(wk, (b * b - a * a) / 2.0) < 1e-14);
    CHECK(rel_diff(poly, (std::pow(b, 30) - std::pow(a, 30)) / 30.0) < 1e-13);
  }
}

TEST_CASE("contour validation") {
  ContourSpec spec;
  spec.vertices = {0.1, 0.1, 4.0};
  spec.n_per_segment = {3, 3};
  CHECK_THROWS_AS(spec.validate(), ConfigurationError);
  CHECK_THROWS_AS(gauss_legendre_on_contour(spec), ConfigurationError);
  spec.vertices = {cplx{0.1, -0.1}, 4.0};
  spec.n_per_segment = {3};
  CHECK_THROWS_AS(spec.validate(), ConfigurationError);
  CHECK_THROWS_AS(default_contour(PartialWave::make(0, 1), 0.05, 44), ConfigurationError);
  const ContourSpec d = default_contour(PartialWave::make(2, 3), 0.07, 45);
  CHECK(d.vertices[1] == cplx{0.4, -0.39});
  CHECK(d.total_nodes() == 45);
  CHECK(d.n_per_segment == std::vector<int>{15, 15, 15});
}

TEST_CASE("points below the contour") {
  const ContourSpec spec = default_contour(PartialWave::make(0, 1), 0.05, 3);
  CHECK(below_contour({0.4, -0.02}, spec));
  CHECK_FALSE(below_contour({0.4, -0.3}, spec));
  CHECK_FALSE(below_contour({0.4, 0.02}, spec));
  CHECK_FALSE(below_contour({5.0, -0.01}, spec));
}

TEST_CASE("discrete content of the bases") {
  const PotentialParams p;
  CHECK(s_basis(45).n_res == 2);
  CHECK(s_basis(45).states[0].kind == StateKind::bound);
  CHECK(s_basis(45).states[1].kind == StateKind::resonant);
  for (int two_j : {5, 3}) {
    const PartialWave d = PartialWave::make(2, two_j);
    const auto poles = basis_poles(p, d, RadialGrid::make(), default_contour(d, resolve_kmin(p, d, 15.0), 3));
    CHECK(poles.size() == 1);
  }
}

TEST_CASE("basis layout and weights") {
  const DiscretizedBasis& b = s_basis(45);
  CHECK(b.size() == b.n_res + 45);
  CHECK(b.n_scattering() == 45);
  const ComplexRule rule = gauss_legendre_on_contour(b.contour);
  for (int i = 0; i < b.size(); ++i) {
    if (i < b.n_res) {
      CHECK(b.states[i].w == cplx{1.0, 0.0});
    } else {
      CHECK(b.states[i].kind == StateKind::scattering);
      CHECK(b.states[i].k == rule.nodes[i - b.n_res]);
      CHECK(b.states[i].w == rule.weights[i - b.n_res]);
    }
  }
}

TEST_CASE("poles and k_min do not depend on the contour discretization") {
  const PotentialParams p;
  const PartialWave s = PartialWave::make(0, 1);
  const RadialGrid grid = RadialGrid::make();
  const double k_min = resolve_kmin(p, s, 15.0);
  CHECK(k_min == resolve_kmin(p, s, 15.0));
  const auto a = basis_poles(p, s, grid, default_contour(s, k_min, 45));
  const auto b = basis_poles(p, s, grid, default_contour(s, k_min, 90));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].k == b[i].k);
    CHECK(a[i].u_R == b[i].u_R);
  }
}

TEST_CASE("completeness on a localized function") {
  const DiscretizedBasis& b = s_basis(120);
  const RadialGrid& g = b.grid;
  auto gauss = [](double r) { return std::exp(-(r - 4.0) * (r - 4.0)); };
  double norm = 0.0;
  for (std::size_t j = 0; j < g.nodes.size(); ++j) norm += g.weights[j] * std::pow(gauss(g.nodes[j]), 2);
  cplx sum = 0.0;
  for (const BerggrenState& s : b.states) {
    cplx c = 0.0;
    for (std::size_t j = 0; j < g.nodes.size(); ++j) c += g.weights[j] * s.u_interior[j] * gauss(g.nodes[j]);
    sum += s.w * c * c;
  }
  CHECK(std::abs(sum - norm) < 1e-4 * norm);
}

TEST_CASE("discretized Berggren orthonormality") {
  const DiscretizedBasis& b = s_basis(45);
  const BerggrenState& bound = b.states[0];
  const BerggrenState& res = b.states[1];
  CHECK(std::abs(overlap(bound, bound, b.grid) - 1.0) < 1e-10);
  CHECK(std::abs(overlap(res, res, b.grid) - 1.0) < 1e-10);
  CHECK(std::abs(overlap(bound, res, b.grid)) < 1e-10);
  // Poles against scattering states, weighted as in the discretized basis.
  for (int i : {2, 10, 20, 30, 46}) {
    const BerggrenState& s = b.states[i];
    CAPTURE(i);
    CHECK(std::abs(std::sqrt(s.w) * overlap(res, s, b.grid)) < 1e-3);
    CHECK(std::abs(std::sqrt(s.w) * overlap(bound, s, b.grid)) < 1e-3);
  }
}

TEST_CASE("snapshot round trip") {
  const DiscretizedBasis& b = s_basis(45);
  std::stringstream buffer;
  write_snapshot(b, buffer);
  const DiscretizedBasis back = read_snapshot(buffer);
  REQUIRE(back.size() == b.size());
  CHECK(back.n_res == b.n_res);
  CHECK(back.pw == b.pw);
  CHECK(back.potential == b.potential);
  CHECK(back.contour.vertices == b.contour.vertices);
  CHECK(back.grid.nodes == b.grid.nodes);
  for (int i = 0; i < b.size(); ++i) {
    CHECK(back.states[i].k == b.states[i].k);
    CHECK(back.states[i].w == b.states[i].w);
    CHECK(back.states[i].C_plus == b.states[i].C_plus);
    CHECK(back.states[i].u_interior == b.states[i].u_interior);
    CHECK(back.states[i].u_probe == b.states[i].u_probe);
  }
  std::stringstream wrong_version(
      std::string(R"({"format": "berggren-basis", "version": 99})"));
  CHECK_THROWS_AS(read_snapshot(wrong_version), ConfigurationError);
  std::stringstream garbage("not json");
  CHECK_THROWS_AS(read_snapshot(garbage), ConfigurationError);
}

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "berggren/basis.hpp"
#include "berggren/errors.hpp"
#include "berggren/exterior.hpp"
#include "berggren/radial.hpp"
#include "berggren/specfun.hpp"
#include "testing.hpp"

using namespace berggren;
using berggren::testing::rel_diff;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

PotentialParams free_particle() {
  PotentialParams p;
  p.V_o = 0.0;
  p.V_so = 0.0;
  p.Z_c = 0.0;
  return p;
}

PotentialParams calibrated(double Z) {
  PotentialParams p;
  p.hbar2_over_2m = 20.7385;
  p.Z_c = Z;
  return p;
}

const RadialGrid& grid() {
  static const RadialGrid g = RadialGrid::make();
  return g;
}

BerggrenState highest_pole(const PotentialParams& p, const PartialWave& pw) {
  const double k_min = resolve_kmin(p, pw, 15.0);
  return basis_poles(p, pw, grid(), default_contour(pw, k_min, 3)).back();
}

// Independent oracle: classical RK4 for u'' = (l(l+1)/z^2 + 2 eta k / z - k^2) u
// along z = R + x e^{i theta}, started from (u, u') at R.
cplx rk4_along_ray(const BerggrenState& s, double theta, double x_end, int steps) {
  const cplx dir = std::polar(1.0, theta);
  const double ll = s.pw.ell * (s.pw.ell + 1.0);
  auto q = [&](cplx z) { return ll / (z * z) + 2.0 * s.eta * s.k / z - s.k * s.k; };
  std::array<cplx, 2> y{s.u_R, s.du_R};
  auto f = [&](double x, const std::array<cplx, 2>& v) {
    const cplx z = s.R + x * dir;
    return std::array<cplx, 2>{dir * v[1], dir * q(z) * v[0]};
  };
  const double h = x_end / steps;
  for (int i = 0; i < steps; ++i) {
    const double x = i * h;
    auto k1 = f(x, y);
    auto k2 = f(x + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
    auto k3 = f(x + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
    auto k4 = f(x + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
    for (int c = 0; c < 2; ++c) y[c] += h / 6 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
  }
  return y[0];
}

}  // namespace

TEST_CASE("radial grid is a Gauss-Legendre rule on [0, R]") {
  const RadialGrid& g = grid();
  REQUIRE(g.nodes.size() == 300);
  CHECK(g.probe.size() == 512);
  double sum = 0.0;
  double cube = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    CHECK(g.weights[i] > 0.0);
    if (i > 0) CHECK(g.nodes[i] > g.nodes[i - 1]);
    sum += g.weights[i];
    cube += g.weights[i] * std::pow(g.nodes[i], 7);
  }
  CHECK(g.nodes.front() > 0.0);
  CHECK(g.nodes.back() < g.R);
  CHECK(rel_diff(sum, 15.0) < 1e-13);
  CHECK(rel_diff(cube, std::pow(15.0, 8) / 8) < 1e-13);
}

TEST_CASE("free particle s wave is sqrt(2/pi) sin(kr)") {
  const PotentialParams p = free_particle();
  const PartialWave s = PartialWave::make(0, 1);
  const double k = 0.7;
  const BerggrenState st = make_scattering(k, p, s, grid());
  const double sign = st.u_interior[10].real() > 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < grid().nodes.size(); i += 37) {
    const double expect = std::sqrt(2 / kPi) * std::sin(k * grid().nodes[i]);
    CHECK(std::abs(sign * st.u_interior[i] - expect) < 1e-10);
  }
  CHECK(std::abs(sign * st.C_plus - (-I * std::sqrt(2 / kPi) / 2.0)) < 1e-10);
  CHECK(std::abs(sign * st.C_minus - (I * std::sqrt(2 / kPi) / 2.0)) < 1e-10);
  CHECK(std::abs(2 * kPi * st.C_plus * st.C_minus - 1.0) < 1e-10);
}

TEST_CASE("scattering states are Dirac normalized and continuous at R") {
  const PotentialParams p;
  for (const PartialWave& pw : {PartialWave::make(0, 1), PartialWave::make(2, 3)}) {
    for (cplx k : {cplx{0.2, 0.0}, cplx{0.3, -0.08}, cplx{0.7, -0.2}, cplx{2.5, 0.0}}) {
      CAPTURE(k);
      const BerggrenState st = make_scattering(k, p, pw, grid());
      CHECK(std::abs(2 * kPi * st.C_plus * st.C_minus - 1.0) < 1e-10);
      const CoulombValue hp = coulomb_H(Sign::plus, st.coulomb(), k * st.R);
      const CoulombValue hm = coulomb_H(Sign::minus, st.coulomb(), k * st.R);
      CHECK(rel_diff(st.u_R, st.C_plus * hp.value + st.C_minus * hm.value) < 1e-9);
      CHECK(rel_diff(st.du_R, k * (st.C_plus * hp.derivative + st.C_minus * hm.derivative)) < 1e-9);
    }
  }
}

TEST_CASE("regular solution behaves as r^{l+1} at the origin") {
  const PotentialParams p;
  const PartialWave d = PartialWave::make(2, 5);
  const std::array<double, 3> radii{1e-3, 2e-3, 4e-3};
  const RegularSolution sol = integrate_regular({0.5, -0.02}, p, d, 15.0, radii);
  const cplx c0 = sol.samples[0] / std::pow(radii[0], 3);
  const cplx c2 = sol.samples[2] / std::pow(radii[2], 3);
  CHECK(rel_diff(c0, c2) < 1e-2);
  CHECK(std::abs(c0) > 0.0);
}

TEST_CASE("published direct-integration poles with the calibrated kinetic constant") {
  struct Row {
    int ell, two_j;
    double Z, E, Gamma;
  };
  // Direct-integration values for both Hamiltonians.
  const Row rows[] = {{0, 1, 10, 1.09747, 134.623}, {0, 1, 8, 0.463324, 8.96828},
                      {2, 5, 10, 1.48359, 11.9527}, {2, 5, 8, 0.666208, 0.525611},
                      {2, 3, 10, 5.07435, 1353.51}, {2, 3, 8, 4.3003, 1091.3}};
  for (const Row& r : rows) {
    CAPTURE(r.ell);
    CAPTURE(r.two_j);
    CAPTURE(r.Z);
    const BerggrenState st = highest_pole(calibrated(r.Z), PartialWave::make(r.ell, r.two_j));
    CHECK(st.kind == StateKind::resonant);
    CHECK(std::abs(st.e.real() - r.E) < 1e-4);
    CHECK(std::abs(st.width_keV() / r.Gamma - 1.0) < 1e-3);
  }
}

TEST_CASE("poles with the default constants are stable regression anchors") {
  const BerggrenState s = highest_pole(PotentialParams{}, PartialWave::make(0, 1));
  CHECK(s.e.real() == doctest::Approx(1.101555).epsilon(2e-6));
  CHECK(s.width_keV() == doctest::Approx(136.803).epsilon(1e-5));
  CHECK(std::abs(s.e - PotentialParams{}.hbar2_over_2m * s.k * s.k) < 1e-12);
}

TEST_CASE("pole energies do not depend on the radial grid size") {
  const PotentialParams p;
  const PartialWave d52 = PartialWave::make(2, 5);
  const BerggrenState coarse = highest_pole(p, d52);
  const RadialGrid fine = RadialGrid::make(15.0, 600);
  const BerggrenState refined = find_pole(coarse.k, p, d52, fine);
  CHECK(std::abs(refined.e.real() - coarse.e.real()) < 1e-6);
  CHECK(std::abs(refined.width_keV() - coarse.width_keV()) < 1e-3);
}

TEST_CASE("discrete states are purely outgoing and Berggren normalized") {
  const PotentialParams p;
  const PartialWave s = PartialWave::make(0, 1);
  const std::vector<BerggrenState> poles =
      basis_poles(p, s, grid(), default_contour(s, resolve_kmin(p, s, 15.0), 3));
  REQUIRE(poles.size() == 2);
  const BerggrenState& bound = poles.front();
  CHECK(bound.kind == StateKind::bound);
  CHECK(bound.C_minus == 0.0);
  CHECK(std::abs(bound.k.real()) < 1e-12);
  // A real bound state has a real positive norm and a real normalization.
  CHECK(std::abs(berggren_norm(bound, grid()) - 1.0) < 1e-10);
  CHECK(std::abs(bound.u_interior[150].imag()) < 1e-10 * std::abs(bound.u_interior[150]));
  const BerggrenState& res = poles.back();
  CHECK(std::abs(berggren_norm(res, grid()) - 1.0) < 1e-10);
  // Renormalizing is idempotent.
  const BerggrenState again = normalize_discrete(res, grid());
  CHECK(rel_diff(again.u_R, res.u_R) < 1e-10);
  // The pole log-derivative matches that of the outgoing wave.
  const CoulombValue hp = coulomb_H(Sign::plus, res.coulomb(), res.k * res.R);
  CHECK(rel_diff(res.du_R / res.u_R, res.k * hp.derivative / hp.value) < 1e-9);
}

TEST_CASE("the resonant d3/2 basis state has a complex norm before rescaling") {
  const BerggrenState res = highest_pole(PotentialParams{}, PartialWave::make(2, 3));
  BerggrenState raw = res;
  // Undo the rescaling with a generic complex factor.
  const cplx f{0.8, 0.3};
  for (auto& v : raw.u_interior) v *= f;
  raw.u_R *= f;
  raw.du_R *= f;
  raw.C_plus *= f;
  const cplx n = berggren_norm(raw, grid());
  CHECK(std::abs(n - f * f) < 1e-9);
  CHECK(std::abs(n.imag()) > 0.1);
}

TEST_CASE("k_min condition and the vanishing of low-momentum scattering states") {
  const PotentialParams p;
  for (const PartialWave& pw : {PartialWave::make(0, 1), PartialWave::make(2, 5)}) {
    const double k_min = resolve_kmin(p, pw, 15.0);
    CHECK(std::abs(kmin_condition(k_min, p, pw, 15.0) - 1e-5) < 1e-9);
    CHECK(kmin_condition(0.5 * k_min, p, pw, 15.0) < kmin_condition(k_min, p, pw, 15.0));
    const BerggrenState st = make_scattering(k_min, p, pw, grid());
    double largest = 0.0;
    for (const cplx& u : st.u_interior) largest = std::max(largest, std::abs(u));
    CHECK(largest < 1e-4);
  }
}

TEST_CASE("exterior components start from the matched decomposition") {
  const PotentialParams p;
  const PartialWave s = PartialWave::make(0, 1);
  const BerggrenState st = make_scattering({0.4, -0.45}, p, s, grid());
  const CoulombValue hp = coulomb_H(Sign::plus, st.coulomb(), st.k * st.R);
  for (double theta : kRotationAngles) {
    if (!ray_admissible(st, theta)) continue;
    CHECK(rel_diff(exterior_component(st, Sign::plus, theta, 0.0), st.C_plus * hp.value) < 1e-10);
  }
  // Rays that take k z across the cut are refused for continuum states.
  bool refused = false;
  for (double theta : kRotationAngles) {
    if (ray_admissible(st, theta)) continue;
    CHECK_THROWS_AS(exterior_component(st, Sign::plus, theta, 5.0), ContourConfigurationError);
    refused = true;
  }
  CHECK(refused);
}

TEST_CASE("bound-state continuation along every ray agrees with direct ODE propagation") {
  const PotentialParams p;
  const PartialWave s = PartialWave::make(0, 1);
  const std::vector<BerggrenState> poles =
      basis_poles(p, s, grid(), default_contour(s, resolve_kmin(p, s, 15.0), 3));
  const BerggrenState& bound = poles.front();
  for (double theta : kRotationAngles) {
    CAPTURE(theta);
    const double x = 6.0;
    const cplx oracle = rk4_along_ray(bound, theta, x, 20000);
    CHECK(rel_diff(exterior_component(bound, Sign::plus, theta, x), oracle) < 1e-10);
  }
  // Along a ray with cos(theta) < 0 the incoming component decays.
  BerggrenState probe = bound;
  probe.C_minus = 1.0;
  const double theta = 0.75 * kPi;
  CHECK(std::abs(exterior_component(probe, Sign::minus, theta, 40.0)) <
        1e-6 * std::abs(exterior_component(probe, Sign::minus, theta, 0.0)));
}

TEST_CASE("theta selection") {
  const PotentialParams p;
  const PartialWave s = PartialWave::make(0, 1);
  const BerggrenState a = make_scattering({0.5, 0.0}, p, s, grid());
  const RotationPolicy policy;
  // Outgoing pairs decay in the upper half plane.
  const int t = select_theta(a, Sign::plus, a, Sign::plus, policy);
  CHECK(std::sin(policy.allowed_thetas[t]) > 0.0);
  // kappa = 0 has no decaying ray.
  CHECK_THROWS_AS(select_theta(a, Sign::plus, a, Sign::minus, policy), SingularPairError);
}

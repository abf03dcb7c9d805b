#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "kvh/characteristics_oracle.hpp"

using namespace kvh;

namespace {

GridSpec plane(std::size_t n, double half) {
  return GridSpec({{"q", Role::q, -half, 2 * half, n}, {"p", Role::p, -half, 2 * half, n}});
}

FlowHamiltonian oscillator() { return flow_hamiltonian({{1.0}, PotentialKind::harmonic, 1.0, {}}); }

}  // namespace

TEST_CASE("flow_hamiltonian coefficients and Horner evaluation") {
  auto h = flow_hamiltonian({{2.0}, PotentialKind::quartic, 3.0, {}});
  CHECK(h.mass == 2.0);
  CHECK(h.potential(2.0) == doctest::Approx(12.0));
  CHECK(h.slope(2.0) == doctest::Approx(24.0));
  FlowHamiltonian poly{1.0, {1.0, -2.0, 0.5, 0.25}};
  CHECK(poly.potential(2.0) == doctest::Approx(1.0 - 4.0 + 2.0 + 2.0));
  CHECK(poly.slope(2.0) == doctest::Approx(-2.0 + 2.0 + 3.0));
  CHECK_THROWS_AS(flow_hamiltonian({{1.0, 1.0}, PotentialKind::pair_harmonic, 1.0, {}}), std::invalid_argument);
}

TEST_CASE("free and harmonic trajectories") {
  FlowHamiltonian free_h{2.0, {}};
  auto z = flow(free_h, {1.0, 3.0, 0.0}, 0.5, 10);
  CHECK(z.q == doctest::Approx(1.75));
  CHECK(z.p == doctest::Approx(3.0));
  CHECK(z.action == doctest::Approx(9.0 * 0.5 / 4.0));

  auto h = oscillator();
  const double t = 0.9;
  auto y = flow(h, {1.0, 0.0, 0.0}, t, 400);
  CHECK(std::abs(y.q - std::cos(t)) < 1e-10);
  CHECK(std::abs(y.p + std::sin(t)) < 1e-10);
  // S = int p^2/2 - q^2/2 = -sin(2t)/4
  CHECK(std::abs(y.action + std::sin(2 * t) / 4) < 1e-10);

  auto back = flow(h, y, -t, 400);
  CHECK(std::abs(back.q - 1.0) < 1e-12);
  CHECK(std::abs(back.action) < 1e-12);
  CHECK_THROWS_AS(flow(h, {0, 0, 0}, 1.0, 0), std::invalid_argument);
}

TEST_CASE("integrate_flow samples and CSV") {
  auto h = flow_hamiltonian({{1.0}, PotentialKind::quartic, 1.0, {}});
  auto b = integrate_flow(h, {{1.0, 0.0}, {0.0, 1.5}}, 2.0, 2000, 500);
  CHECK(b.times == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  REQUIRE(b.samples.size() == 2);
  CHECK(b.samples[0].size() == 5);
  CHECK(b.max_energy_drift < 1e-10);
  CHECK_FALSE(b.flagged);

  auto coarse = integrate_flow(h, {{2.0, 0.0}}, 2.0, 10);
  CHECK(coarse.flagged);
  CHECK(coarse.times.size() == 2);

  std::ostringstream os;
  b.write_csv(os, h);
  const auto text = os.str();
  CHECK(text.rfind("seed_q,seed_p,t,q,p,S,energy\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 11);
}

TEST_CASE("flow preserves phase-space area") {
  auto h = flow_hamiltonian({{1.0}, PotentialKind::quartic, 1.0, {}});
  const double e = 1e-5;
  for (auto [q, p] : {std::pair{0.3, 0.2}, std::pair{-1.1, 0.7}, std::pair{1.4, -0.9}}) {
    auto f = [&](double dq, double dp) { return flow(h, {q + dq, p + dp, 0.0}, 1.3, 4000); };
    auto a = f(e, 0), b = f(-e, 0), c = f(0, e), d = f(0, -e);
    const double j11 = (a.q - b.q) / (2 * e), j21 = (a.p - b.p) / (2 * e);
    const double j12 = (c.q - d.q) / (2 * e), j22 = (c.p - d.p) / (2 * e);
    CHECK(std::abs(j11 * j22 - j12 * j21 - 1.0) < 1e-6);
  }
}

TEST_CASE("interpolation: exact on nodes, convergent between them") {
  auto g = plane(64, 6.0);
  GaussianSpec spec{{0.2, -0.4}, {0.9, 0.9}, PhaseKind::none, {}};
  auto w = gaussian_init(g, spec);
  CHECK(interpolate(w, g.axis(0).coordinate(17), g.axis(1).coordinate(40), Interpolation::cubic) == w[17 * 64 + 40]);
  // wraps periodically
  CHECK(std::abs(interpolate(w, g.axis(0).coordinate(0) + 12.0, g.axis(1).coordinate(3), Interpolation::lagrange8) -
                 w[3]) < 1e-14);

  double err4 = 0.0;
  double err8 = 0.0;
  for (double q = -1.5; q < 1.5; q += 0.137) {
    for (double p = -1.9; p < 1.1; p += 0.173) {
      const double c[2] = {q, p};
      const cplx exact = gaussian_value(g, spec, c);
      err4 = std::max(err4, std::abs(interpolate(w, q, p, Interpolation::cubic) - exact));
      err8 = std::max(err8, std::abs(interpolate(w, q, p, Interpolation::lagrange8) - exact));
    }
  }
  CHECK(err4 < 1e-3);
  CHECK(err8 < err4 / 10);
  CHECK(parse_interpolation("lagrange8") == Interpolation::lagrange8);
  CHECK_THROWS_AS(parse_interpolation("spline"), std::invalid_argument);
}

TEST_CASE("reference at t = 0 is the initial state") {
  auto g = plane(32, 6.0);
  auto w = gaussian_init(g, {{0.5, 0.5}, {1.2, 1.2}, PhaseKind::none, {}});
  auto r = reference_solution(w, oscillator(), 0.0, Formalism::kvh, 10);
  CHECK(r.flagged == 0);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(r.psi[i] == w[i]);
}

TEST_CASE("free KvH reference matches the closed form") {
  auto g = plane(64, 8.0);
  GaussianSpec spec{{0.0, 1.0}, {1.0, 1.0}, PhaseKind::none, {}};
  const double t = 0.7;
  auto psi0 = [&](double q, double p) {
    const double c[2] = {q, p};
    return gaussian_value(g, spec, c);
  };
  auto r = reference_solution(g, psi0, FlowHamiltonian{1.0, {}}, t, Formalism::kvh, 50);
  double worst = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!r.valid[c]) continue;
    const double q = g.coordinate(c, 0);
    const double p = g.coordinate(c, 1);
    worst = std::max(worst, std::abs(r.psi[c] - psi0(q - p * t, p) * std::polar(1.0, p * p * t / 2)));
  }
  CHECK(worst < 1e-12);
  CHECK(r.flagged > 0);  // fast corners stream out of the box
}

TEST_CASE("trajectories that leave the domain are flagged") {
  auto g = plane(16, 4.0);
  auto r = reference_solution(
      g, [](double, double) { return cplx(1.0); }, oscillator(), std::numbers::pi / 4, Formalism::kvn, 100);
  CHECK(r.flagged > 0);
  CHECK(r.flagged < g.size() / 2);
  std::size_t invalid = 0;
  for (auto v : r.valid) invalid += v == 0;
  CHECK(invalid == r.flagged);
  CHECK_THROWS_AS(reference_solution(GridSpec({{"q", Role::q, -1, 2, 8}}), [](double, double) { return cplx(1.0); },
                                     oscillator(), 1.0, Formalism::kvn, 10),
                  GridError);
}

TEST_CASE("compare reports a global phase") {
  auto g = plane(32, 6.0);
  auto a = gaussian_init(g, {{0.0, 0.0}, {1.2, 1.2}, PhaseKind::none, {}});
  auto b = std::polar(1.0, 0.3) * a;
  auto m = compare(a, b);
  CHECK(m.global_phase == doctest::Approx(0.3));
  CHECK(m.phase_linf == doctest::Approx(0.3));
  CHECK(m.phase_linf_aligned < 1e-12);
  CHECK(m.l2_aligned < 1e-12);
  CHECK(m.modulus_linf < 1e-14);
  CHECK(m.l2 == doctest::Approx(2 * std::sin(0.15)));
  CHECK_THROWS_AS(compare(a, gaussian_init(plane(16, 6.0), {{0.0, 0.0}, {2.4, 2.4}, PhaseKind::none, {}})), GridError);
}

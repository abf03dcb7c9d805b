#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "kvh/galilei_action.hpp"

using namespace kvh;

namespace {

GridSpec plane() { return GridSpec({{"q", Role::q, -8, 16, 128}, {"p", Role::p, -8, 16, 128}}); }

Wavefunction packet(const GridSpec& g) { return gaussian_init(g, {{0.3, -0.2}, {0.8, 0.8}, PhaseKind::none, {}}); }

double distance(const Wavefunction& a, const Wavefunction& b) { return std::sqrt((a - b).norm()); }

}  // namespace

TEST_CASE("translation and boost pick up the central phase in KvH") {
  auto g = plane();
  auto w = packet(g);
  auto r = weyl_phase(GroupElement::translation(0.7, Formalism::kvh), GroupElement::boost(1.3, 0.0, Formalism::kvh), w);
  CHECK(r.residual <= 1e-6);
  CHECK(std::abs(r.phase - std::polar(1.0, -0.91)) <= 1e-6);
  REQUIRE(r.predicted);
  CHECK(std::abs(*r.predicted - std::polar(1.0, -0.91)) <= 1e-12);
  CHECK(r.phase_error() <= 1e-6);
  CHECK(r.central());

  // mass scales the phase
  auto heavy = weyl_phase(GroupElement::translation(0.7, Formalism::kvh, 2.0),
                          GroupElement::boost(0.5, 0.0, Formalism::kvh, 2.0), w);
  CHECK(std::abs(heavy.phase - std::polar(1.0, -0.7)) <= 1e-6);
}

TEST_CASE("KvN Galilei action commutes") {
  auto g = plane();
  auto w = packet(g);
  auto r = weyl_phase(GroupElement::translation(0.7, Formalism::kvn), GroupElement::boost(1.3, 0.0, Formalism::kvn), w);
  CHECK(r.residual <= 1e-6);
  CHECK(std::abs(r.phase - 1.0) <= 1e-6);
  REQUIRE(r.predicted);
  CHECK(*r.predicted == std::complex<double>(1.0));

  auto t = weyl_phase(GroupElement::translation(0.4, Formalism::kvh), GroupElement::free_time(0.6, Formalism::kvh), w);
  CHECK(t.residual <= 1e-6);
  CHECK(t.phase_error() <= 1e-6);

  auto mq = weyl_phase(GroupElement::translation(0.5, Formalism::kvh),
                       GroupElement::momentum_translation(0.25, Formalism::kvh), w);
  CHECK(mq.residual <= 1e-6);
  CHECK(std::abs(mq.phase - 1.0) <= 1e-6);
}

TEST_CASE("boost and time translation do not commute up to a phase") {
  auto g = plane();
  auto w = packet(g);
  auto r = weyl_phase(GroupElement::boost(0.8, 0.0, Formalism::kvh), GroupElement::free_time(0.5, Formalism::kvh), w);
  CHECK_FALSE(r.predicted);
  CHECK_FALSE(r.central());
  CHECK(r.phase_error() == std::numeric_limits<double>::infinity());
}

TEST_CASE("inverse undoes the action") {
  auto g = plane();
  auto w = packet(g);
  for (auto f : {Formalism::kvn, Formalism::kvh}) {
    for (auto e : {GroupElement::translation(1.1, f), GroupElement::momentum_translation(-0.6, f),
                   GroupElement::boost(0.9, 0.0, f, 1.5), GroupElement::free_time(0.4, f)}) {
      CHECK(distance(act(inverse(e), act(e, w)), w) <= 1e-8);
    }
  }
  CHECK_THROWS_AS(act({GroupKind::rotation, 0.3, 0.0, Formalism::kvh, 1.0}, w), std::invalid_argument);
  CHECK_THROWS_AS(act(GroupElement::translation(1.0, Formalism::quantum), w), std::invalid_argument);
  CHECK_THROWS_AS(predicted_phase(GroupElement::translation(1.0, Formalism::kvh),
                                  GroupElement::boost(1.0, 0.0, Formalism::kvn)),
                  std::invalid_argument);
}

TEST_CASE("boost moves the packet in momentum") {
  auto g = plane();
  auto w = packet(g);
  auto b = act(GroupElement::boost(0.5, 2.0, Formalism::kvn, 2.0), w);
  CHECK(density_moment(b, [&](std::size_t c) { return g.coordinate(c, 0); }) == doctest::Approx(0.3 + 1.0).epsilon(1e-8));
  CHECK(density_moment(b, [&](std::size_t c) { return g.coordinate(c, 1); }) == doctest::Approx(-0.2 + 1.0).epsilon(1e-8));
  CHECK(GroupElement::boost(0.5, 2.0, Formalism::kvn, 2.0).str() == "boost(v=0.5 t=2)");
}

TEST_CASE("free evolution is boost covariant") {
  auto g = plane();
  auto w = packet(g);
  for (auto f : {Formalism::kvn, Formalism::kvh}) {
    auto r = covariance_check(f, 1.0, 0.8, 0.6, w);
    CHECK(r.residual <= 1e-6);
    CHECK(std::abs(r.phase - 1.0) <= 1e-6);
  }
  CHECK_THROWS_AS(covariance_check(Formalism::hybrid, 1.0, 0.8, 0.6, w), std::invalid_argument);
}

TEST_CASE("action CSV layout") {
  std::ostringstream os;
  write_action_csv(os, {{"kvh", "translation", "boost", "a=0.7 v=1.3", std::polar(1.0, -0.91), -0.91, 1e-12},
                        {"kvh", "boost", "free_time", "v=0.8 t=0.5", 1.0, std::nan(""), 0.4}});
  const auto text = os.str();
  CHECK(text.rfind("formalism,g1,g2,params,phase_re,phase_im,predicted_phase,residual\n", 0) == 0);
  CHECK(text.find("\"a=0.7 v=1.3\"") != std::string::npos);
  CHECK(text.find(",nan,") != std::string::npos);
}

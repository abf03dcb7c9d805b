#include <random>

#include "doctest.h"
#include "kvh/exactpoly.hpp"

using namespace kvh;

namespace {

SymbolSetPtr phase_symbols() { return make_symbols({"m", "t", "kappa", "q", "p", "q1", "q2"}); }

CPoly random_poly(const SymbolSetPtr& s, std::mt19937& rng, int max_degree, int max_terms) {
  std::uniform_int_distribution<int> coef(-1000, 1000);
  std::uniform_int_distribution<int> den(1, 7);
  std::uniform_int_distribution<int> nterms(0, max_terms);
  std::uniform_int_distribution<std::size_t> which(0, s->size() - 1);
  std::uniform_int_distribution<int> deg(0, max_degree);
  CPoly r(s);
  for (int k = nterms(rng); k > 0; --k) {
    Monomial m(s->size(), 0);
    int d = deg(rng);
    for (int e = 0; e < d; ++e) ++m[which(rng)];
    r += CPoly::monomial(s, m, GaussianRational(mpq_class(coef(rng), den(rng)), mpq_class(coef(rng), den(rng))));
  }
  return r;
}

}  // namespace

TEST_CASE("GaussianRational arithmetic is exact and canonical") {
  auto i = GaussianRational::i();
  CHECK(i * i == GaussianRational(-1));
  auto half = GaussianRational::ratio(2, 4);
  CHECK(half.re().get_den() == 2);
  CHECK(half.re().get_num() == 1);
  CHECK(GaussianRational::ratio(3, -6).re().get_den() > 0);
  CHECK((GaussianRational(1) / GaussianRational::ratio(1, 3)) == GaussianRational(3));
  CHECK((GaussianRational(1, 1) / GaussianRational(1, 1)) == GaussianRational(1));
  CHECK_THROWS_AS(GaussianRational(1) / GaussianRational(0), std::domain_error);
  CHECK(GaussianRational::from_double(0.1).re() == mpq_class(0.1));
  CHECK(GaussianRational::ratio(-1, 2).str() == "(-1/2)");
  CHECK(GaussianRational(0, 1).str() == "(1/1)i");
  CHECK(GaussianRational(mpq_class(1, 2), mpq_class(-3, 4)).str() == "(1/2-3/4i)");
}

TEST_CASE("cpoly_add examples") {
  auto s = phase_symbols();
  auto q = CPoly::symbol(s, "q");
  auto p = CPoly::symbol(s, "p");
  CHECK((q + p) + (-p) == q);
  auto h = GaussianRational::ratio(1, 2) * CPoly::symbol(s, "m", -1) * p.pow(2);
  CHECK(CPoly(s) + h == h);
  CHECK(q.pow(2) + q.pow(2) == GaussianRational(2) * q.pow(2));
  CHECK((q - q).is_zero());
  CHECK((q - q).terms().empty());
}

TEST_CASE("cpoly_mul examples") {
  auto s = phase_symbols();
  auto q = CPoly::symbol(s, "q");
  auto p = CPoly::symbol(s, "p");
  auto m = CPoly::symbol(s, "m");
  auto t = CPoly::symbol(s, "t");
  CHECK((q - p) * (q + p) == q.pow(2) - p.pow(2));
  auto i = CPoly::constant(s, GaussianRational::i());
  CHECK(i * i == CPoly::constant(s, -1));
  auto g = m * q - t * p;
  CHECK(g * CPoly::constant(s, 1) == g);
}

TEST_CASE("symbol set mismatch is rejected") {
  auto a = CPoly::symbol(make_symbols({"q", "p"}), "q");
  auto b = CPoly::symbol(make_symbols({"p", "q"}), "q");
  CHECK_THROWS_AS(a + b, SymbolError);
  CHECK_THROWS_AS(a * b, SymbolError);
  CHECK_THROWS_AS(CPoly::symbol(make_symbols({"q"}), "z"), SymbolError);
  CHECK_THROWS_AS(make_symbols({"q", "q"}), SymbolError);
  // equal content counts as the same set
  auto c = CPoly::symbol(make_symbols({"q", "p"}), "p");
  CHECK_NOTHROW(a + c);
}

TEST_CASE("cpoly_partial examples") {
  auto s = phase_symbols();
  auto q = CPoly::symbol(s, "q");
  auto p = CPoly::symbol(s, "p");
  auto m = CPoly::symbol(s, "m");
  auto inv_m = CPoly::symbol(s, "m", -1);
  auto t = CPoly::symbol(s, "t");
  auto kappa = CPoly::symbol(s, "kappa");
  auto half = GaussianRational::ratio(1, 2);

  CHECK((half * inv_m * p.pow(2)).partial("p") == p * inv_m);
  CHECK((m * q - t * p).partial("q") == m);
  auto r = CPoly::symbol(s, "q1") - CPoly::symbol(s, "q2");
  CHECK((half * kappa * r.pow(2)).partial("q1") == kappa * r);
  CHECK_THROWS_AS(q.partial("nope"), SymbolError);
  // Laurent exponents differentiate correctly
  CHECK(inv_m.partial("m") == -CPoly::symbol(s, "m", -2));
}

TEST_CASE("cpoly_eval examples") {
  auto s = phase_symbols();
  auto q = CPoly::symbol(s, "q");
  auto p = CPoly::symbol(s, "p");
  auto m = CPoly::symbol(s, "m");
  auto t = CPoly::symbol(s, "t");
  CHECK(q.pow(2).eval({{"q", 3.0}}) == std::complex<double>(9.0));
  CHECK((m * q - t * p).eval({{"m", 1.0}, {"q", 2.0}, {"t", 0.0}, {"p", 5.0}}) == std::complex<double>(2.0));
  auto h = GaussianRational::ratio(1, 2) * CPoly::symbol(s, "m", -1) * p.pow(2);
  CHECK(h.eval({{"p", 2.0}, {"m", 1.0}}) == std::complex<double>(2.0));
  CHECK_THROWS_AS(q.eval({{"p", 1.0}}), SymbolError);
  CHECK_THROWS_AS(h.eval({{"p", 1.0}, {"m", 0.0}}), std::domain_error);
}

TEST_CASE("canonical rendering") {
  auto s = make_symbols({"m", "t", "q", "p"});
  auto g = CPoly::symbol(s, "m") * CPoly::symbol(s, "q") - CPoly::symbol(s, "t") * CPoly::symbol(s, "p");
  CHECK(g.str() == "(1/1)m*q + (-1/1)t*p");
  CHECK(CPoly(s).str() == "0");
  CHECK((CPoly::symbol(s, "q", 2) + CPoly::symbol(s, "q")).str() == "(1/1)q^2 + (1/1)q");
}

TEST_CASE("rebased maps symbols by name") {
  auto a = make_symbols({"m", "q2"});
  auto b = make_symbols({"x2", "m"});
  auto f = CPoly::symbol(a, "m") * CPoly::symbol(a, "q2", 2);
  auto g = f.rebased(b, {{"q2", "x2"}});
  CHECK(g == CPoly::symbol(b, "m") * CPoly::symbol(b, "x2", 2));
  CHECK_THROWS_AS(f.rebased(make_symbols({"m"})), SymbolError);
}

TEST_CASE("ring axioms on random polynomials") {
  auto s = phase_symbols();
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 60; ++trial) {
    auto a = random_poly(s, rng, 3, 4);
    auto b = random_poly(s, rng, 3, 4);
    auto c = random_poly(s, rng, 3, 4);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * b == b * a);
    CHECK((a - a).is_zero());
  }
}

TEST_CASE("mixed partials commute") {
  auto s = phase_symbols();
  std::mt19937 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    auto a = random_poly(s, rng, 5, 6);
    for (std::size_t x = 0; x < s->size(); ++x) {
      for (std::size_t y = x + 1; y < s->size(); ++y) {
        CHECK(a.partial(x).partial(y) == a.partial(y).partial(x));
      }
    }
  }
}

TEST_CASE("eval is a ring homomorphism to float tolerance") {
  auto s = phase_symbols();
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 40; ++trial) {
    auto a = random_poly(s, rng, 3, 4);
    auto b = random_poly(s, rng, 3, 4);
    std::map<std::string, std::complex<double>, std::less<>> env;
    for (const auto& n : s->names()) env[n] = u(rng);
    const auto ea = a.eval(env);
    const auto eb = b.eval(env);
    const double scale = 1.0 + std::abs(ea) * std::abs(eb) + std::abs(ea) + std::abs(eb);
    CHECK(std::abs((a * b).eval(env) - ea * eb) <= 1e-12 * scale);
    CHECK(std::abs((a + b).eval(env) - (ea + eb)) <= 1e-12 * scale);
  }
}

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace kvh {

/// Raised when polynomials over different symbol sets are combined, or a
/// symbol is unknown or unbound.
class SymbolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact complex number a + b i with a, b rational.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long value) : re_(value) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(mpq_class re, mpq_class im = 0);

  static GaussianRational i() { return {0, 1}; }
  /// Exact conversion of a finite double (every double is a dyadic rational).
  static GaussianRational from_double(double re, double im = 0.0);
  static GaussianRational ratio(long num, long den);

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }
  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussianRational conj() const { return {re_, -im_}; }
  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  GaussianRational& operator+=(const GaussianRational& o);
  GaussianRational& operator-=(const GaussianRational& o);
  GaussianRational& operator*=(const GaussianRational& o);
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  GaussianRational operator-() const { return {-re_, -im_}; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// `(a/b)`, `(c/d)i` or `(a/b+c/di)`.
  std::string str() const;

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

/// Ordered, duplicate-free list of symbol names. Polynomials carry a shared
/// pointer to the set they were built over.
class SymbolSet {
 public:
  explicit SymbolSet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index(std::string_view name) const;  // throws SymbolError

  friend bool operator==(const SymbolSet& a, const SymbolSet& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
};

using SymbolSetPtr = std::shared_ptr<const SymbolSet>;

SymbolSetPtr make_symbols(std::vector<std::string> names);

/// Exponent vector over a SymbolSet. Exponents are signed so that central
/// parameters such as masses may appear inverted (p/m).
using Monomial = std::vector<int>;

/// Graded lexicographic order, larger total degree first.
struct GradedLexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Commutative Laurent polynomial with Gaussian-rational coefficients.
///
/// Terms are kept in a map keyed by graded-lex order with no zero
/// coefficients, so two polynomials are equal iff their term maps are equal.
/// Values are immutable once built; all operations return new polynomials.
class CPoly {
 public:
  using Terms = std::map<Monomial, GaussianRational, GradedLexGreater>;

  explicit CPoly(SymbolSetPtr symbols);

  static CPoly constant(SymbolSetPtr symbols, const GaussianRational& c);
  static CPoly symbol(SymbolSetPtr symbols, std::string_view name, int power = 1);
  static CPoly monomial(SymbolSetPtr symbols, Monomial exponents, const GaussianRational& c);

  const SymbolSetPtr& symbol_set() const { return symbols_; }
  const SymbolSet& symbols() const { return *symbols_; }
  const Terms& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  /// Constant term only (possibly zero).
  bool is_constant() const;
  std::optional<GaussianRational> constant_value() const;
  bool depends_on(std::size_t symbol_index) const;
  bool depends_on(std::string_view name) const;
  /// True when every coefficient is real.
  bool has_real_coefficients() const;

  CPoly& operator+=(const CPoly& o);
  CPoly& operator-=(const CPoly& o);
  friend CPoly operator+(CPoly a, const CPoly& b) { return a += b; }
  friend CPoly operator-(CPoly a, const CPoly& b) { return a -= b; }
  friend CPoly operator*(const CPoly& a, const CPoly& b);
  friend CPoly operator*(const GaussianRational& c, const CPoly& a);
  CPoly operator-() const;
  friend bool operator==(const CPoly& a, const CPoly& b);

  CPoly pow(unsigned n) const;
  CPoly partial(std::string_view name) const;
  CPoly partial(std::size_t symbol_index) const;
  CPoly conj() const;

  /// Re-expresses the polynomial over `target`, mapping symbols by name
  /// (after applying `renames`). Throws SymbolError when a symbol the
  /// polynomial actually uses has no counterpart.
  CPoly rebased(const SymbolSetPtr& target,
                const std::map<std::string, std::string>& renames = {}) const;

  /// Floating evaluation in canonical term order. Every symbol that occurs
  /// must be bound; unused symbols may be left out.
  std::complex<double> eval(const std::map<std::string, std::complex<double>, std::less<>>& bindings) const;

  /// e.g. `(1/1)m*q + (-1/1)t*p`; zero renders as `0`.
  std::string str() const;

 private:
  void add_term(const Monomial& m, const GaussianRational& c);
  void require_same_symbols(const CPoly& o) const;

  SymbolSetPtr symbols_;
  Terms terms_;
};

}  // namespace kvh

#include "kvh/exactpoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace kvh {

// ---------------------------------------------------------------------------
// GaussianRational

GaussianRational::GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

GaussianRational GaussianRational::from_double(double re, double im) {
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw std::domain_error("GaussianRational::from_double: non-finite value");
  }
  return {mpq_class(re), mpq_class(im)};
}

GaussianRational GaussianRational::ratio(long num, long den) {
  if (den == 0) throw std::domain_error("GaussianRational::ratio: zero denominator");
  return {mpq_class(num, den), 0};
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  mpq_class den = o.re_ * o.re_ + o.im_ * o.im_;
  if (sgn(den) == 0) throw std::domain_error("GaussianRational: division by zero");
  mpq_class re = (re_ * o.re_ + im_ * o.im_) / den;
  mpq_class im = (im_ * o.re_ - re_ * o.im_) / den;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

namespace {

std::string rational_str(const mpq_class& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace

std::string GaussianRational::str() const {
  if (sgn(im_) == 0) return "(" + rational_str(re_) + ")";
  if (sgn(re_) == 0) return "(" + rational_str(im_) + ")i";
  std::string im = rational_str(im_);
  if (sgn(im_) > 0) im = "+" + im;
  return "(" + rational_str(re_) + im + "i)";
}

// ---------------------------------------------------------------------------
// SymbolSet

SymbolSet::SymbolSet(std::vector<std::string> names) : names_(std::move(names)) {
  std::vector<std::string> sorted = names_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw SymbolError("SymbolSet: duplicate symbol name");
  }
  for (const auto& n : names_) {
    if (n.empty()) throw SymbolError("SymbolSet: empty symbol name");
  }
}

std::optional<std::size_t> SymbolSet::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t SymbolSet::index(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw SymbolError("unknown symbol '" + std::string(name) + "'");
}

SymbolSetPtr make_symbols(std::vector<std::string> names) {
  return std::make_shared<const SymbolSet>(std::move(names));
}

// ---------------------------------------------------------------------------
// Monomial order

namespace {

long total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), 0L); }

int checked_add(int a, int b) {
  int r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("CPoly: exponent overflow");
  return r;
}

}  // namespace

bool GradedLexGreater::operator()(const Monomial& a, const Monomial& b) const {
  const long da = total_degree(a);
  const long db = total_degree(b);
  if (da != db) return da > db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

// ---------------------------------------------------------------------------
// CPoly

CPoly::CPoly(SymbolSetPtr symbols) : symbols_(std::move(symbols)) {
  if (!symbols_) throw SymbolError("CPoly: null symbol set");
}

CPoly CPoly::constant(SymbolSetPtr symbols, const GaussianRational& c) {
  CPoly r(std::move(symbols));
  r.add_term(Monomial(r.symbols().size(), 0), c);
  return r;
}

CPoly CPoly::symbol(SymbolSetPtr symbols, std::string_view name, int power) {
  CPoly r(std::move(symbols));
  Monomial m(r.symbols().size(), 0);
  m[r.symbols().index(name)] = power;
  r.add_term(m, 1);
  return r;
}

CPoly CPoly::monomial(SymbolSetPtr symbols, Monomial exponents, const GaussianRational& c) {
  CPoly r(std::move(symbols));
  if (exponents.size() != r.symbols().size()) throw SymbolError("CPoly::monomial: exponent length mismatch");
  r.add_term(exponents, c);
  return r;
}

void CPoly::add_term(const Monomial& m, const GaussianRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void CPoly::require_same_symbols(const CPoly& o) const {
  if (symbols_ != o.symbols_ && !(*symbols_ == *o.symbols_)) {
    throw SymbolError("CPoly: symbol-set mismatch");
  }
}

bool CPoly::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  const auto& m = terms_.begin()->first;
  return std::all_of(m.begin(), m.end(), [](int e) { return e == 0; });
}

std::optional<GaussianRational> CPoly::constant_value() const {
  if (!is_constant()) return std::nullopt;
  if (terms_.empty()) return GaussianRational{};
  return terms_.begin()->second;
}

bool CPoly::depends_on(std::size_t symbol_index) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const auto& t) { return t.first.at(symbol_index) != 0; });
}

bool CPoly::depends_on(std::string_view name) const {
  auto i = symbols_->find(name);
  return i && depends_on(*i);
}

bool CPoly::has_real_coefficients() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_real(); });
}

CPoly& CPoly::operator+=(const CPoly& o) {
  require_same_symbols(o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

CPoly& CPoly::operator-=(const CPoly& o) {
  require_same_symbols(o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

CPoly operator*(const CPoly& a, const CPoly& b) {
  a.require_same_symbols(b);
  CPoly r(a.symbols_);
  Monomial m(a.symbols().size());
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      for (std::size_t k = 0; k < m.size(); ++k) m[k] = checked_add(ma[k], mb[k]);
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

CPoly operator*(const GaussianRational& c, const CPoly& a) {
  CPoly r(a.symbols_);
  for (const auto& [m, ca] : a.terms_) r.add_term(m, c * ca);
  return r;
}

CPoly CPoly::operator-() const { return GaussianRational(-1) * *this; }

bool operator==(const CPoly& a, const CPoly& b) {
  a.require_same_symbols(b);
  return a.terms_ == b.terms_;
}

CPoly CPoly::pow(unsigned n) const {
  CPoly result = constant(symbols_, 1);
  CPoly base = *this;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

CPoly CPoly::partial(std::string_view name) const { return partial(symbols_->index(name)); }

CPoly CPoly::partial(std::size_t k) const {
  if (k >= symbols_->size()) throw SymbolError("CPoly::partial: symbol index out of range");
  CPoly r(symbols_);
  for (const auto& [m, c] : terms_) {
    if (m[k] == 0) continue;
    Monomial d = m;
    d[k] = checked_add(d[k], -1);
    r.add_term(d, c * GaussianRational(static_cast<long>(m[k])));
  }
  return r;
}

CPoly CPoly::conj() const {
  CPoly r(symbols_);
  for (const auto& [m, c] : terms_) r.add_term(m, c.conj());
  return r;
}

CPoly CPoly::rebased(const SymbolSetPtr& target, const std::map<std::string, std::string>& renames) const {
  CPoly r(target);
  std::vector<std::optional<std::size_t>> where(symbols_->size());
  for (std::size_t k = 0; k < symbols_->size(); ++k) {
    std::string n = symbols_->name(k);
    if (auto it = renames.find(n); it != renames.end()) n = it->second;
    where[k] = target->find(n);
  }
  for (const auto& [m, c] : terms_) {
    Monomial out(target->size(), 0);
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k] == 0) continue;
      if (!where[k]) throw SymbolError("CPoly::rebased: no target symbol for '" + symbols_->name(k) + "'");
      out[*where[k]] = checked_add(out[*where[k]], m[k]);
    }
    r.add_term(out, c);
  }
  return r;
}

std::complex<double> CPoly::eval(
    const std::map<std::string, std::complex<double>, std::less<>>& bindings) const {
  std::vector<std::optional<std::complex<double>>> values(symbols_->size());
  for (std::size_t k = 0; k < symbols_->size(); ++k) {
    if (auto it = bindings.find(symbols_->name(k)); it != bindings.end()) values[k] = it->second;
  }
  std::complex<double> sum = 0.0;
  for (const auto& [m, c] : terms_) {
    std::complex<double> term = c.to_complex();
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k] == 0) continue;
      if (!values[k]) throw SymbolError("CPoly::eval: unbound symbol '" + symbols_->name(k) + "'");
      if (m[k] < 0 && *values[k] == 0.0) {
        throw std::domain_error("CPoly::eval: negative power of zero-valued '" + symbols_->name(k) + "'");
      }
      term *= std::pow(*values[k], m[k]);
    }
    sum += term;
  }
  return sum;
}

std::string CPoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c.str();
    bool lead = true;
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k] == 0) continue;
      os << (lead ? "" : "*") << symbols_->name(k);
      if (m[k] != 1) os << '^' << m[k];
      lead = false;
    }
  }
  return os.str();
}

}  // namespace kvh

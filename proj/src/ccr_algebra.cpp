#include "kvh/ccr_algebra.hpp"

#include <algorithm>
#include <sstream>

namespace kvh {

Layout Layout::single_classical(int dim, std::vector<std::string> constants) {
  return Layout{dim, {{Sector::classical, "m"}}, std::move(constants)};
}

Layout Layout::single_quantum(int dim, std::vector<std::string> constants) {
  return Layout{dim, {{Sector::quantum, "m"}}, std::move(constants)};
}

Layout Layout::pair(int dim, Sector first, Sector second, std::vector<std::string> constants) {
  return Layout{dim, {{first, "m1"}, {second, "m2"}}, std::move(constants)};
}

// ---------------------------------------------------------------------------
// Algebra

Algebra::Algebra(Layout layout) : layout_(std::move(layout)) {
  if (layout_.dim < 1 || layout_.dim > 3) throw std::invalid_argument("Algebra: dimension must be 1, 2 or 3");
  if (layout_.particles.empty()) throw std::invalid_argument("Algebra: no particles");

  const int n = particle_count();
  const int d = layout_.dim;
  for (GeneratorKind kind : {GeneratorKind::pos, GeneratorKind::mom, GeneratorKind::lam_pos, GeneratorKind::lam_mom}) {
    for (int a = 1; a <= n; ++a) {
      if (sector(a) != Sector::classical) continue;
      for (int j = 1; j <= d; ++j) generators_.push_back({Sector::classical, kind, a, j});
    }
  }
  for (GeneratorKind kind : {GeneratorKind::pos, GeneratorKind::mom}) {
    for (int a = 1; a <= n; ++a) {
      if (sector(a) != Sector::quantum) continue;
      for (int j = 1; j <= d; ++j) generators_.push_back({Sector::quantum, kind, a, j});
    }
  }
  if (generators_.size() > 0xFFFF) throw std::invalid_argument("Algebra: too many generators");

  for (std::size_t u = 0; u < generators_.size(); ++u) {
    for (std::size_t v = u + 1; v < generators_.size(); ++v) {
      const auto& g = generators_[u];
      const auto& h = generators_[v];
      if (g.particle != h.particle || g.axis != h.axis || g.sector != h.sector) continue;
      const bool conjugate =
          (g.sector == Sector::classical &&
           ((g.kind == GeneratorKind::pos && h.kind == GeneratorKind::lam_pos) ||
            (g.kind == GeneratorKind::mom && h.kind == GeneratorKind::lam_mom))) ||
          (g.sector == Sector::quantum && g.kind == GeneratorKind::pos && h.kind == GeneratorKind::mom);
      if (conjugate) table_.emplace(std::pair{u, v}, GaussianRational::i());
    }
  }

  std::vector<std::string> names;
  for (const auto& p : layout_.particles) {
    if (std::find(names.begin(), names.end(), p.mass) == names.end()) names.push_back(p.mass);
  }
  names.emplace_back("t");
  for (const auto& c : layout_.constants) names.push_back(c);
  central_count_ = names.size();

  std::vector<GeneratorId> symbol_gens;
  for (int a = 1; a <= n; ++a) {
    for (int j = 1; j <= d; ++j) {
      if (sector(a) == Sector::classical) {
        names.push_back(coordinate_name("q", a, j));
        symbol_gens.push_back({Sector::classical, GeneratorKind::pos, a, j});
        names.push_back(coordinate_name("p", a, j));
        symbol_gens.push_back({Sector::classical, GeneratorKind::mom, a, j});
      } else {
        names.push_back(coordinate_name("x", a, j));
        symbol_gens.push_back({Sector::quantum, GeneratorKind::pos, a, j});
      }
    }
  }
  symbols_ = make_symbols(std::move(names));
  symbol_generator_.assign(central_count_, std::nullopt);
  for (const auto& g : symbol_gens) symbol_generator_.push_back(index_of(g));
}

std::string Algebra::coordinate_name(std::string_view base, int particle, int axis) const {
  std::string s(base);
  if (particle_count() > 1) s += std::to_string(particle);
  if (layout_.dim > 1) s += "_" + std::to_string(axis);
  return s;
}

std::size_t Algebra::index_of(const GeneratorId& g) const {
  auto it = std::find(generators_.begin(), generators_.end(), g);
  if (it == generators_.end()) throw std::invalid_argument("Algebra: generator not in algebra");
  return static_cast<std::size_t>(it - generators_.begin());
}

std::string Algebra::generator_name(std::size_t index) const {
  const auto& g = generator(index);
  std::string_view base;
  if (g.sector == Sector::classical) {
    switch (g.kind) {
      case GeneratorKind::pos: base = "q"; break;
      case GeneratorKind::mom: base = "p"; break;
      case GeneratorKind::lam_pos: base = "lq"; break;
      case GeneratorKind::lam_mom: base = "lp"; break;
    }
  } else {
    base = g.kind == GeneratorKind::pos ? "x" : "k";
  }
  return coordinate_name(base, g.particle, g.axis);
}

const GaussianRational& Algebra::commutator(std::size_t a, std::size_t b) const {
  static const GaussianRational zero;
  auto it = table_.find({a, b});
  return it == table_.end() ? zero : it->second;
}

std::string Algebra::position_symbol(int particle, int axis) const {
  return coordinate_name(sector(particle) == Sector::classical ? "q" : "x", particle, axis);
}

std::string Algebra::momentum_symbol(int particle, int axis) const {
  if (sector(particle) != Sector::classical) {
    throw std::invalid_argument("Algebra: quantum particles have no momentum symbol");
  }
  return coordinate_name("p", particle, axis);
}

std::optional<std::size_t> Algebra::generator_for_symbol(std::size_t symbol_index) const {
  return symbol_generator_.at(symbol_index);
}

AlgebraPtr make_algebra(Layout layout) { return std::make_shared<const Algebra>(std::move(layout)); }

// ---------------------------------------------------------------------------
// NCPoly

NCPoly::NCPoly(AlgebraPtr algebra) : algebra_(std::move(algebra)) {
  if (!algebra_) throw std::invalid_argument("NCPoly: null algebra");
}

NCPoly NCPoly::scalar(AlgebraPtr algebra, const CPoly& c) {
  NCPoly r(std::move(algebra));
  for (const auto& [m, coeff] : c.terms()) {
    for (std::size_t k = r.algebra_->central_count(); k < m.size(); ++k) {
      if (m[k] != 0) throw std::invalid_argument("NCPoly::scalar: coefficient is not central");
    }
  }
  r.add_ordered({}, c);
  return r;
}

NCPoly NCPoly::scalar(AlgebraPtr algebra, const GaussianRational& c) {
  auto cp = algebra->constant(c);
  return scalar(std::move(algebra), cp);
}

NCPoly NCPoly::generator(AlgebraPtr algebra, const GeneratorId& g) {
  NCPoly r(algebra);
  r.add_ordered({static_cast<std::uint16_t>(algebra->index_of(g))}, algebra->constant(1));
  return r;
}

bool NCPoly::is_central() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

std::optional<CPoly> NCPoly::central_value() const {
  if (!is_central()) return std::nullopt;
  if (terms_.empty()) return algebra_->zero();
  return terms_.begin()->second;
}

void NCPoly::add_ordered(const Word& word, const CPoly& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(word);
  if (it == terms_.end()) {
    terms_.emplace(word, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

void NCPoly::require_same_algebra(const NCPoly& o) const {
  if (algebra_ != o.algebra_ && !(*algebra_ == *o.algebra_)) {
    throw std::invalid_argument("NCPoly: operands belong to different algebras");
  }
}

NCPoly& NCPoly::operator+=(const NCPoly& o) {
  require_same_algebra(o);
  for (const auto& [w, c] : o.terms_) add_ordered(w, c);
  return *this;
}

NCPoly& NCPoly::operator-=(const NCPoly& o) {
  require_same_algebra(o);
  for (const auto& [w, c] : o.terms_) add_ordered(w, -c);
  return *this;
}

NCPoly operator*(const NCPoly& a, const NCPoly& b) {
  a.require_same_algebra(b);
  NCPoly r(a.algebra_);
  for (const auto& [wa, ca] : a.terms_) {
    for (const auto& [wb, cb] : b.terms_) {
      CPoly c = ca * cb;
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      if (wa.empty() || wb.empty() || wa.back() <= wb.front()) {
        r.add_ordered(w, c);
      } else {
        r += normal_order(a.algebra_, w, c);
      }
    }
  }
  return r;
}

NCPoly operator*(const CPoly& c, const NCPoly& a) { return NCPoly::scalar(a.algebra_, c) * a; }

NCPoly operator*(const GaussianRational& c, const NCPoly& a) {
  NCPoly r(a.algebra_);
  for (const auto& [w, coeff] : a.terms_) r.add_ordered(w, c * coeff);
  return r;
}

NCPoly NCPoly::operator-() const { return GaussianRational(-1) * *this; }

bool operator==(const NCPoly& a, const NCPoly& b) {
  a.require_same_algebra(b);
  return (a - b).is_zero();
}

std::string NCPoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    if (c.terms().size() == 1) {
      os << c.str();
    } else {
      os << '[' << c.str() << ']';
    }
    for (auto g : w) os << '*' << algebra_->generator_name(g);
  }
  return os.str();
}

NCPoly normal_order(const AlgebraPtr& algebra, const std::vector<std::uint16_t>& word, const CPoly& coeff) {
  NCPoly result(algebra);
  // Pending words are merged by key so identical rewrites combine early.
  std::map<Word, CPoly> pending;
  pending.emplace(word, coeff);
  while (!pending.empty()) {
    auto node = pending.extract(pending.begin());
    const Word& w = node.key();
    const CPoly& c = node.mapped();
    if (c.is_zero()) continue;
    std::size_t i = 0;
    while (i + 1 < w.size() && w[i] <= w[i + 1]) ++i;
    if (i + 1 >= w.size()) {
      result.add_ordered(w, c);
      continue;
    }
    // w = u a b v with a > b:  a b = b a − [b, a]
    Word swapped = w;
    std::swap(swapped[i], swapped[i + 1]);
    auto add = [&](Word key, const CPoly& value) {
      auto [it, inserted] = pending.try_emplace(std::move(key), value);
      if (!inserted) it->second += value;
    };
    const GaussianRational& ba = algebra->commutator(w[i + 1], w[i]);
    if (!ba.is_zero()) {
      Word contracted;
      contracted.reserve(w.size() - 2);
      contracted.insert(contracted.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
      contracted.insert(contracted.end(), w.begin() + static_cast<std::ptrdiff_t>(i + 2), w.end());
      add(std::move(contracted), (-ba) * c);
    }
    add(std::move(swapped), c);
  }
  return result;
}

NCPoly commutator(const NCPoly& a, const NCPoly& b) { return a * b - b * a; }

NCPoly adjoint(const NCPoly& a) {
  NCPoly r(a.algebra());
  for (const auto& [w, c] : a.terms()) {
    Word rev(w.rbegin(), w.rend());
    r += normal_order(a.algebra(), rev, c.conj());
  }
  return r;
}

NCPoly multiplication_operator(const AlgebraPtr& algebra, const CPoly& f0) {
  const CPoly f = f0.rebased(algebra->symbols());
  NCPoly r(algebra);
  const std::size_t nc = algebra->central_count();
  for (const auto& [m, c] : f.terms()) {
    Monomial central(m.size(), 0);
    Word w;
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (k < nc) {
        central[k] = m[k];
        continue;
      }
      if (m[k] < 0) throw std::invalid_argument("multiplication_operator: negative power of a coordinate");
      auto g = algebra->generator_for_symbol(k);
      for (int e = 0; e < m[k]; ++e) w.push_back(static_cast<std::uint16_t>(*g));
    }
    std::sort(w.begin(), w.end());
    r.add_ordered(w, CPoly::monomial(algebra->symbols(), central, c));
  }
  return r;
}

CPoly poisson_bracket(const Algebra& algebra, const CPoly& a, const CPoly& b) {
  CPoly r = algebra.zero();
  for (int n = 1; n <= algebra.particle_count(); ++n) {
    if (algebra.sector(n) != Sector::classical) continue;
    for (int j = 1; j <= algebra.dim(); ++j) {
      const auto q = algebra.position_symbol(n, j);
      const auto p = algebra.momentum_symbol(n, j);
      r += a.partial(q) * b.partial(p) - a.partial(p) * b.partial(q);
    }
  }
  return r;
}

NCPoly kvn_map(const AlgebraPtr& algebra, const CPoly& f0) {
  const CPoly f = f0.rebased(algebra->symbols());
  NCPoly r(algebra);
  for (int n = 1; n <= algebra->particle_count(); ++n) {
    if (algebra->sector(n) != Sector::classical) continue;
    for (int j = 1; j <= algebra->dim(); ++j) {
      const auto lq = NCPoly::generator(algebra, {Sector::classical, GeneratorKind::lam_pos, n, j});
      const auto lp = NCPoly::generator(algebra, {Sector::classical, GeneratorKind::lam_mom, n, j});
      r += multiplication_operator(algebra, f.partial(algebra->momentum_symbol(n, j))) * lq;
      r -= multiplication_operator(algebra, f.partial(algebra->position_symbol(n, j))) * lp;
    }
  }
  return r;
}

NCPoly kvh_map(const AlgebraPtr& algebra, const CPoly& f0) {
  const CPoly f = f0.rebased(algebra->symbols());
  CPoly scalar_part = f;
  for (int n = 1; n <= algebra->particle_count(); ++n) {
    if (algebra->sector(n) != Sector::classical) continue;
    for (int j = 1; j <= algebra->dim(); ++j) {
      const auto p = algebra->momentum_symbol(n, j);
      scalar_part -= algebra->sym(p) * f.partial(p);
    }
  }
  return kvn_map(algebra, f) + multiplication_operator(algebra, scalar_part);
}

std::string to_string(Formalism f) {
  switch (f) {
    case Formalism::kvn: return "kvn";
    case Formalism::kvh: return "kvh";
    case Formalism::quantum: return "quantum";
    case Formalism::hybrid: return "hybrid";
  }
  return "?";
}

Formalism parse_formalism(std::string_view s) {
  for (auto f : {Formalism::kvn, Formalism::kvh, Formalism::quantum, Formalism::hybrid}) {
    if (s == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown formalism '" + std::string(s) + "' (expected kvn, kvh, quantum or hybrid)");
}

GalileiGenerators galilei_generators(const AlgebraPtr& algebra, Formalism formalism,
                                     const GeneratorOptions& options) {
  const int n = algebra->particle_count();
  const int d = algebra->dim();
  for (int a = 1; a <= n; ++a) {
    const Sector s = algebra->sector(a);
    if ((formalism == Formalism::kvn || formalism == Formalism::kvh) && s != Sector::classical) {
      throw std::invalid_argument("galilei_generators: " + to_string(formalism) + " requires classical particles");
    }
    if (formalism == Formalism::quantum && s != Sector::quantum) {
      throw std::invalid_argument("galilei_generators: quantum formalism requires quantum particles");
    }
  }
  const bool want_rotations = options.rotations.value_or(d >= 2);
  if (want_rotations && d == 1) throw std::invalid_argument("galilei_generators: rotations need dim >= 2");

  auto rule = [&](const CPoly& f) {
    return formalism == Formalism::kvn ? kvn_map(algebra, f) : kvh_map(algebra, f);
  };
  auto gen = [&](Sector s, GeneratorKind k, int a, int j) { return NCPoly::generator(algebra, {s, k, a, j}); };
  auto sym = [&](const std::string& name) { return algebra->sym(name); };
  const CPoly t = sym("t");

  GalileiGenerators out{{}, {}, {}, {}, NCPoly(algebra)};
  for (int j = 1; j <= d; ++j) {
    NCPoly translation(algebra);
    NCPoly momentum(algebra);
    NCPoly boost(algebra);
    for (int a = 1; a <= n; ++a) {
      const CPoly m = sym(algebra->mass_symbol(a));
      if (algebra->sector(a) == Sector::classical) {
        translation += gen(Sector::classical, GeneratorKind::lam_pos, a, j);
        momentum += gen(Sector::classical, GeneratorKind::mom, a, j);
        boost += rule(m * sym(algebra->position_symbol(a, j)) - t * sym(algebra->momentum_symbol(a, j)));
      } else {
        const auto x = gen(Sector::quantum, GeneratorKind::pos, a, j);
        const auto k = gen(Sector::quantum, GeneratorKind::mom, a, j);
        translation += k;
        momentum += k;
        boost += m * x - t * k;
      }
    }
    out.translations.push_back(std::move(translation));
    out.momenta.push_back(std::move(momentum));
    out.boosts.push_back(std::move(boost));
  }

  if (want_rotations) {
    // dim 2 has the single rotation about the third axis.
    const std::vector<int> axes = d == 3 ? std::vector<int>{1, 2, 3} : std::vector<int>{3};
    for (int i : axes) {
      const int j = i % 3 + 1;
      const int k = j % 3 + 1;  // (i, j, k) cyclic
      NCPoly rotation(algebra);
      for (int a = 1; a <= n; ++a) {
        if (algebra->sector(a) == Sector::classical) {
          const CPoly ang = sym(algebra->position_symbol(a, j)) * sym(algebra->momentum_symbol(a, k)) -
                            sym(algebra->position_symbol(a, k)) * sym(algebra->momentum_symbol(a, j));
          rotation += rule(ang);
        } else {
          rotation += gen(Sector::quantum, GeneratorKind::pos, a, j) * gen(Sector::quantum, GeneratorKind::mom, a, k) -
                      gen(Sector::quantum, GeneratorKind::pos, a, k) * gen(Sector::quantum, GeneratorKind::mom, a, j);
        }
      }
      out.rotations.push_back(std::move(rotation));
    }
  }

  NCPoly time(algebra);
  const auto half = GaussianRational::ratio(1, 2);
  for (int a = 1; a <= n; ++a) {
    const CPoly inv_m = algebra->sym(algebra->mass_symbol(a), -1);
    for (int j = 1; j <= d; ++j) {
      if (algebra->sector(a) == Sector::classical) {
        time += rule(half * inv_m * sym(algebra->momentum_symbol(a, j)).pow(2));
      } else {
        const auto k = gen(Sector::quantum, GeneratorKind::mom, a, j);
        time += (half * inv_m) * (k * k);
      }
    }
  }
  if (options.potential) {
    if (formalism == Formalism::quantum) {
      time += multiplication_operator(algebra, *options.potential);
    } else {
      time += rule(*options.potential);
    }
  }
  out.time_translation = std::move(time);
  return out;
}

AlgebraPtr klein_target_algebra(const Algebra& algebra, const std::set<int>& targets) {
  Layout layout = algebra.layout();
  for (int a : targets) {
    if (a < 1 || a > algebra.particle_count()) throw std::invalid_argument("klein_quantize: no such particle");
    if (algebra.sector(a) != Sector::classical) {
      throw std::invalid_argument("klein_quantize: particle " + std::to_string(a) + " is not classical");
    }
    layout.particles[static_cast<std::size_t>(a - 1)].sector = Sector::quantum;
  }
  return make_algebra(std::move(layout));
}

NCPoly klein_quantize(const NCPoly& a, const std::set<int>& targets) {
  const Algebra& from = *a.algebra();
  AlgebraPtr to = klein_target_algebra(from, targets);

  // Old generator index -> new index, or nullopt for a target λp.
  std::vector<std::optional<std::uint16_t>> map(from.generator_count());
  for (std::size_t g = 0; g < from.generator_count(); ++g) {
    GeneratorId id = from.generator(g);
    if (targets.count(id.particle) != 0) {
      if (id.kind == GeneratorKind::lam_mom) continue;
      id.kind = id.kind == GeneratorKind::pos ? GeneratorKind::pos : GeneratorKind::mom;
      id.sector = Sector::quantum;
    }
    map[g] = static_cast<std::uint16_t>(to->index_of(id));
  }

  NCPoly r(to);
  for (const auto& [w, c] : a.terms()) {
    std::vector<std::uint16_t> mapped;
    bool dropped = false;
    for (auto g : w) {
      if (!map[g]) {
        dropped = true;
        break;
      }
      mapped.push_back(*map[g]);
    }
    if (dropped) continue;
    r += normal_order(to, mapped, c.rebased(to->symbols()));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Verification

std::size_t VerificationReport::ok_count() const {
  return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const auto& r) { return r.ok(); }));
}

std::string VerificationReport::text() const {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.holds ? "PASS" : "FAIL") << "  " << r.label << " = " << r.expected << "  residual=" << r.residual.str();
    if (!r.expect_holds) os << "  (negative control, expected to fail)";
    os << '\n';
  }
  os << (all_ok() ? "PASS " : "FAIL ") << ok_count() << '/' << results.size() << " relations\n";
  return os.str();
}

std::string VerificationReport::csv() const {
  std::ostringstream os;
  os << "relation_id,status,residual\n";
  for (const auto& r : results) {
    os << r.id << ',' << (r.holds ? "PASS" : "FAIL") << ",\"" << r.residual.str() << "\"\n";
  }
  return os.str();
}

VerificationReport verify_algebra(const std::vector<Relation>& relations) {
  VerificationReport report;
  for (const auto& rel : relations) {
    NCPoly residual = (rel.b ? commutator(rel.a, *rel.b) : rel.a) - rel.expected;
    const bool holds = residual.is_zero();
    report.results.push_back({rel.id, rel.label, rel.expected.str(), holds, rel.expect_holds, std::move(residual)});
  }
  return report;
}

}  // namespace kvh

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kvh/exactpoly.hpp"

namespace kvh {

enum class Sector { classical, quantum };

/// Classical particles carry pos (q), mom (p), lam_pos (λq), lam_mom (λp);
/// quantum particles carry pos (x) and mom (k) only.
enum class GeneratorKind { pos, mom, lam_pos, lam_mom };

struct GeneratorId {
  Sector sector = Sector::classical;
  GeneratorKind kind = GeneratorKind::pos;
  int particle = 1;  // 1-based
  int axis = 1;      // 1-based

  friend bool operator==(const GeneratorId&, const GeneratorId&) = default;
};

struct ParticleSpec {
  Sector sector = Sector::classical;
  std::string mass;  // name of the central mass symbol

  friend bool operator==(const ParticleSpec&, const ParticleSpec&) = default;
};

/// Particles with their sectors and mass symbols, plus the spatial dimension.
/// `constants` lists extra central symbols such as couplings.
struct Layout {
  int dim = 1;
  std::vector<ParticleSpec> particles;
  std::vector<std::string> constants;

  friend bool operator==(const Layout&, const Layout&) = default;

  /// One classical particle with mass `m`.
  static Layout single_classical(int dim, std::vector<std::string> constants = {});
  /// One quantum particle with mass `m`.
  static Layout single_quantum(int dim, std::vector<std::string> constants = {});
  /// Particles 1 and 2 with masses m1, m2 in the given sectors.
  static Layout pair(int dim, Sector first, Sector second, std::vector<std::string> constants = {});
};

/// Operator algebra generated by the per-particle canonical generators, with
/// central scalar commutators
///   [q_i, λq_j] = [p_i, λp_j] = [x_i, k_j] = i δ_ij, all others zero.
///
/// Generators are totally ordered as: classical q, p, λq, λp (each block by
/// particle then axis), then quantum x, k. Every multiplication generator
/// precedes every derivative generator.
///
/// The symbol set used for coefficients and phase-space functions lists the
/// masses, `t`, the constants, and then one symbol per classical q, p and
/// quantum x coordinate.
class Algebra {
 public:
  explicit Algebra(Layout layout);

  const Layout& layout() const { return layout_; }
  const SymbolSetPtr& symbols() const { return symbols_; }
  int dim() const { return layout_.dim; }
  int particle_count() const { return static_cast<int>(layout_.particles.size()); }
  Sector sector(int particle) const { return layout_.particles.at(particle - 1).sector; }

  std::size_t generator_count() const { return generators_.size(); }
  const GeneratorId& generator(std::size_t index) const { return generators_.at(index); }
  std::size_t index_of(const GeneratorId& g) const;
  std::string generator_name(std::size_t index) const;

  /// [a, b] for generator indices a < b, as a central constant.
  const GaussianRational& commutator(std::size_t a, std::size_t b) const;

  /// Number of central symbols at the front of the symbol set.
  std::size_t central_count() const { return central_count_; }
  bool is_central_symbol(std::size_t symbol_index) const { return symbol_index < central_count_; }

  std::string mass_symbol(int particle) const { return layout_.particles.at(particle - 1).mass; }
  /// q symbol of a classical particle, x symbol of a quantum one.
  std::string position_symbol(int particle, int axis) const;
  /// p symbol; classical particles only.
  std::string momentum_symbol(int particle, int axis) const;

  /// Generator index for the multiplication operator represented by a
  /// phase-space symbol, if the symbol is one.
  std::optional<std::size_t> generator_for_symbol(std::size_t symbol_index) const;

  CPoly zero() const { return CPoly(symbols_); }
  CPoly constant(const GaussianRational& c) const { return CPoly::constant(symbols_, c); }
  CPoly sym(std::string_view name, int power = 1) const { return CPoly::symbol(symbols_, name, power); }

  friend bool operator==(const Algebra& a, const Algebra& b) { return a.layout_ == b.layout_; }

 private:
  std::string coordinate_name(std::string_view base, int particle, int axis) const;

  Layout layout_;
  std::vector<GeneratorId> generators_;
  std::map<std::pair<std::size_t, std::size_t>, GaussianRational> table_;
  SymbolSetPtr symbols_;
  std::size_t central_count_ = 0;
  std::vector<std::optional<std::size_t>> symbol_generator_;
};

using AlgebraPtr = std::shared_ptr<const Algebra>;

AlgebraPtr make_algebra(Layout layout);

/// Normal-ordered word: generator indices in nondecreasing order.
using Word = std::vector<std::uint16_t>;

/// Element of the operator algebra written in normal form. Coefficients are
/// central polynomials (masses, t, constants only). Because the form is
/// canonical, operator equality is structural equality.
class NCPoly {
 public:
  using Terms = std::map<Word, CPoly>;

  explicit NCPoly(AlgebraPtr algebra);

  static NCPoly scalar(AlgebraPtr algebra, const CPoly& c);
  static NCPoly scalar(AlgebraPtr algebra, const GaussianRational& c);
  static NCPoly generator(AlgebraPtr algebra, const GeneratorId& g);

  const AlgebraPtr& algebra() const { return algebra_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Only the empty word (a central scalar) is present.
  bool is_central() const;
  std::optional<CPoly> central_value() const;

  NCPoly& operator+=(const NCPoly& o);
  NCPoly& operator-=(const NCPoly& o);
  friend NCPoly operator+(NCPoly a, const NCPoly& b) { return a += b; }
  friend NCPoly operator-(NCPoly a, const NCPoly& b) { return a -= b; }
  friend NCPoly operator*(const NCPoly& a, const NCPoly& b);
  friend NCPoly operator*(const CPoly& c, const NCPoly& a);
  friend NCPoly operator*(const GaussianRational& c, const NCPoly& a);
  NCPoly operator-() const;
  friend bool operator==(const NCPoly& a, const NCPoly& b);

  std::string str() const;

  /// Adds c·word with `word` already normal-ordered.
  void add_ordered(const Word& word, const CPoly& c);

 private:
  void require_same_algebra(const NCPoly& o) const;

  AlgebraPtr algebra_;
  Terms terms_;
};

/// Rewrites coeff·word into normal form using the central commutators.
NCPoly normal_order(const AlgebraPtr& algebra, const std::vector<std::uint16_t>& word, const CPoly& coeff);

NCPoly commutator(const NCPoly& a, const NCPoly& b);

/// Reverses every word and conjugates every coefficient (all generators are
/// self-adjoint), then re-normal-orders.
NCPoly adjoint(const NCPoly& a);

/// Multiplication operator for a phase-space function: q, p, x symbols
/// become the corresponding generators, central symbols stay coefficients.
NCPoly multiplication_operator(const AlgebraPtr& algebra, const CPoly& f);

/// {a, b} = Σ ∂a/∂q ∂b/∂p − ∂a/∂p ∂b/∂q over classical particles.
CPoly poisson_bracket(const Algebra& algebra, const CPoly& a, const CPoly& b);

/// −i{·, f} = Σ (∂f/∂p_i) λq_i − (∂f/∂q_i) λp_i over classical particles.
/// Quantum positions in f act as multiplication operators.
NCPoly kvn_map(const AlgebraPtr& algebra, const CPoly& f);

/// kvn_map(f) + f − Σ p_i ∂f/∂p_i.
NCPoly kvh_map(const AlgebraPtr& algebra, const CPoly& f);

enum class Formalism { kvn, kvh, quantum, hybrid };

std::string to_string(Formalism f);
Formalism parse_formalism(std::string_view s);

struct GeneratorOptions {
  /// Interaction potential over the algebra's symbols; empty means free.
  std::optional<CPoly> potential;
  /// Rotations are built by default for dim >= 2; requesting them with
  /// dim == 1 is an error.
  std::optional<bool> rotations;
};

/// Total Galilei generators of a multi-particle system, per axis.
struct GalileiGenerators {
  std::vector<NCPoly> translations;  // Σ λq (classical) + Σ k (quantum)
  std::vector<NCPoly> rotations;     // empty for dim 1
  std::vector<NCPoly> boosts;
  std::vector<NCPoly> momenta;       // Σ p (classical) + Σ k (quantum)
  NCPoly time_translation;
};

/// kvn: every classical particle via the KvN rule. kvh and hybrid: classical
/// particles via the KvH rule and quantum particles via x, k. quantum: all
/// particles must be quantum.
GalileiGenerators galilei_generators(const AlgebraPtr& algebra, Formalism formalism,
                                     const GeneratorOptions& options = {});

/// Klein quantization of the given classical particles: drops every term
/// containing one of their λp generators, then substitutes p → k, q → x,
/// λq → k left to right and re-normal-orders in the algebra where those
/// particles are quantum.
NCPoly klein_quantize(const NCPoly& a, const std::set<int>& targets);

AlgebraPtr klein_target_algebra(const Algebra& algebra, const std::set<int>& targets);

/// Checks [a, b] = expected, or a = expected when `b` is empty.
struct Relation {
  std::string id;
  std::string label;  // e.g. "[G_1, lq_2]"
  NCPoly a;
  std::optional<NCPoly> b;
  NCPoly expected;
  /// Negative controls expect the relation not to hold.
  bool expect_holds = true;
};

struct RelationResult {
  std::string id;
  std::string label;
  std::string expected;
  bool holds = false;
  bool expect_holds = true;
  NCPoly residual;

  bool ok() const { return holds == expect_holds; }
};

struct VerificationReport {
  std::vector<RelationResult> results;

  std::size_t ok_count() const;
  bool all_ok() const { return ok_count() == results.size(); }
  /// One `PASS/FAIL  [A, B] = expected  residual=...` line per relation and
  /// a trailing summary line.
  std::string text() const;
  /// relation_id,status,residual
  std::string csv() const;
};

/// Residual [a, b] − expected (or a − expected) for every relation; exact.
VerificationReport verify_algebra(const std::vector<Relation>& relations);

}  // namespace kvh

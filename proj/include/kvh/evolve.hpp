#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "kvh/ccr_algebra.hpp"
#include "kvh/phasespace_grid.hpp"

namespace kvh {

enum class PotentialKind { free, harmonic, quartic, pair_harmonic, hybrid_harmonic, polynomial };

std::string to_string(PotentialKind k);
PotentialKind parse_potential_kind(std::string_view s);

// harmonic:        kappa q^2 / 2
// quartic:         kappa q^4 / 4
// polynomial:      sum_n c_n q^n
// pair_harmonic:   kappa (q1 - q2)^2 / 2
// hybrid_harmonic: kappa (q - x)^2 / 2
struct Hamiltonian {
  /// Classical particles in grid order, then quantum particles.
  std::vector<double> masses;
  PotentialKind potential = PotentialKind::free;
  double kappa = 1.0;
  std::vector<double> coefficients;
};

/// V over symbols named after the position axes (classical q axes, then x axes).
CPoly potential_polynomial(const Hamiltonian& h, const std::vector<std::string>& q_axes,
                           const std::vector<std::string>& x_axes);

enum class SubstepKind { stream, kinetic_phase, quantum_kinetic, potential_phase, kick };

std::string to_string(SubstepKind k);

// stream:          psi(q - f dt p/m, p) for every classical particle
// kinetic_phase:   exp(+i f dt p^2/2m), KvH and hybrid
// quantum_kinetic: exp(-i f dt k^2/2m) on every x axis
// potential_phase: exp(-i f dt V), KvH and hybrid
// kick:            psi(q, p + f dt dV/dq)
struct Substep {
  SubstepKind kind;
  double fraction;

  friend bool operator==(const Substep&, const Substep&) = default;
};

struct PropagatorPlan {
  Formalism formalism = Formalism::kvn;
  Hamiltonian hamiltonian;
  double dt = 0.0;
  bool drop_force = false;
  std::vector<Substep> substeps;

  bool palindromic() const;
};

/// Strang splitting into the kinetic group (stream, kinetic phase, quantum
/// kinetic) and the potential group (potential phase, kick), each of which is
/// a set of commuting exact flows. `drop_force` removes the kick.
PropagatorPlan build_plan(Formalism formalism, const Hamiltonian& h, double dt, bool drop_force = false);

/// Merges a substep sequence: commuting neighbours are regrouped and equal
/// kinds are summed. Used to fuse consecutive steps.
std::vector<Substep> fuse(const std::vector<Substep>& seq);

class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(std::size_t step, const std::string& what) : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct Observables {
  double t = 0.0;
  double norm = 0.0;
  double q_mean = 0.0;  // summed over q axes
  double p_mean = 0.0;  // summed over p axes
  double k_mean = 0.0;  // summed over x axes
  double energy = 0.0;
  double im_max = 0.0;
  double leakage = 0.0;
};

struct RunRecord {
  std::vector<Observables> samples;

  void write_csv(std::ostream& os) const;
};

/// Throws std::invalid_argument when the plan cannot run on the grid (axis
/// roles, mass count, potential arity).
void check_compatible(const PropagatorPlan& plan, const GridSpec& grid);

/// A plan bound to a grid, with the substep multipliers tabulated.
class Propagator {
 public:
  Propagator(PropagatorPlan plan, GridSpec grid);
  ~Propagator();
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  const PropagatorPlan& plan() const { return plan_; }
  const GridSpec& grid() const { return grid_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const CPoly& potential() const { return *potential_; }

  void apply(Wavefunction& w, const Substep& s) const;
  void step(Wavefunction& w) const;
  /// `steps` steps with fused substeps between them.
  void advance(Wavefunction& w, std::size_t steps) const;

  Observables observe(const Wavefunction& w, double t) const;

 private:
  struct Tables;
  const Tables& tables(const Substep& s) const;
  std::size_t position_index(std::size_t flat) const;

  PropagatorPlan plan_;
  GridSpec grid_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<std::size_t> x_axes_;
  std::vector<std::size_t> position_axes_;
  std::vector<std::size_t> position_strides_;
  std::size_t position_size_ = 1;
  std::vector<double> classical_mass_;
  std::vector<double> quantum_mass_;
  std::unique_ptr<CPoly> potential_;
  std::vector<double> v_values_;
  std::vector<std::vector<double>> v_gradient_;  // per classical pair
  std::vector<std::string> warnings_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<int, double>, std::unique_ptr<Tables>> cache_;
};

/// Pure single step.
Wavefunction step(const Wavefunction& w, const Propagator& prop);

struct RunResult {
  RunRecord record;
  Wavefunction final_state;
};

/// Samples at step 0 and every `sample_every` steps (and at the end).
/// `on_sample(index, state)` is called for each sample. Throws
/// NumericalAbort when a non-finite value shows up.
RunResult run(const Wavefunction& w0, const Propagator& prop, double t_final, std::size_t sample_every,
              const std::function<void(std::size_t, const Wavefunction&)>& on_sample = {});

/// Number of steps t_final / dt; throws when it is not an integer.
std::size_t step_count(double t_final, double dt);

}  // namespace kvh

#include "kvh/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace kvh {

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::free: return "free";
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::quartic: return "quartic";
    case PotentialKind::pair_harmonic: return "pair_harmonic";
    case PotentialKind::hybrid_harmonic: return "hybrid_harmonic";
    case PotentialKind::polynomial: return "polynomial";
  }
  return "?";
}

PotentialKind parse_potential_kind(std::string_view s) {
  for (auto k : {PotentialKind::free, PotentialKind::harmonic, PotentialKind::quartic, PotentialKind::pair_harmonic,
                 PotentialKind::hybrid_harmonic, PotentialKind::polynomial}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown potential '" + std::string(s) + "'");
}

std::string to_string(SubstepKind k) {
  switch (k) {
    case SubstepKind::stream: return "stream";
    case SubstepKind::kinetic_phase: return "kinetic_phase";
    case SubstepKind::quantum_kinetic: return "quantum_kinetic";
    case SubstepKind::potential_phase: return "potential_phase";
    case SubstepKind::kick: return "kick";
  }
  return "?";
}

CPoly potential_polynomial(const Hamiltonian& h, const std::vector<std::string>& q_axes,
                           const std::vector<std::string>& x_axes) {
  std::vector<std::string> names = q_axes;
  names.insert(names.end(), x_axes.begin(), x_axes.end());
  auto syms = make_symbols(names);
  const auto kappa = GaussianRational::from_double(h.kappa);
  auto need = [&](std::size_t nq, std::size_t nx) {
    if (q_axes.size() != nq || x_axes.size() != nx) {
      std::ostringstream msg;
      msg << "potential '" << to_string(h.potential) << "' needs " << nq << " classical and " << nx
          << " quantum particle(s), grid has " << q_axes.size() << " and " << x_axes.size();
      throw std::invalid_argument(msg.str());
    }
  };
  auto sym = [&](const std::string& n) { return CPoly::symbol(syms, n); };
  switch (h.potential) {
    case PotentialKind::free:
      return CPoly(syms);
    case PotentialKind::harmonic:
      need(1, 0);
      return (kappa * GaussianRational::ratio(1, 2)) * sym(q_axes[0]).pow(2);
    case PotentialKind::quartic:
      need(1, 0);
      return (kappa * GaussianRational::ratio(1, 4)) * sym(q_axes[0]).pow(4);
    case PotentialKind::polynomial: {
      need(1, 0);
      if (h.coefficients.empty()) throw std::invalid_argument("polynomial potential needs coefficients");
      CPoly v(syms);
      for (std::size_t n = 0; n < h.coefficients.size(); ++n) {
        v += GaussianRational::from_double(h.coefficients[n]) * sym(q_axes[0]).pow(static_cast<unsigned>(n));
      }
      return v;
    }
    case PotentialKind::pair_harmonic:
      need(2, 0);
      return (kappa * GaussianRational::ratio(1, 2)) * (sym(q_axes[0]) - sym(q_axes[1])).pow(2);
    case PotentialKind::hybrid_harmonic:
      need(1, 1);
      return (kappa * GaussianRational::ratio(1, 2)) * (sym(q_axes[0]) - sym(x_axes[0])).pow(2);
  }
  throw std::invalid_argument("unsupported potential");
}

// ---------------------------------------------------------------------------
// plans

namespace {

bool kinetic_group(SubstepKind k) {
  return k == SubstepKind::stream || k == SubstepKind::kinetic_phase || k == SubstepKind::quantum_kinetic;
}

bool pointwise(SubstepKind k) { return k == SubstepKind::kinetic_phase || k == SubstepKind::potential_phase; }

void push_merged(std::vector<Substep>& out, Substep s) {
  if (!out.empty() && out.back().kind == s.kind) {
    out.back().fraction += s.fraction;
  } else {
    out.push_back(s);
  }
}

}  // namespace

bool PropagatorPlan::palindromic() const {
  return std::equal(substeps.begin(), substeps.end(), substeps.rbegin());
}

PropagatorPlan build_plan(Formalism formalism, const Hamiltonian& h, double dt, bool drop_force) {
  if (formalism == Formalism::quantum) throw std::invalid_argument("build_plan: formalism must be kvn, kvh or hybrid");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("build_plan: dt must be positive and finite");
  if (h.potential == PotentialKind::hybrid_harmonic && formalism != Formalism::hybrid) {
    throw std::invalid_argument("build_plan: hybrid_harmonic coupling needs the hybrid formalism");
  }

  std::vector<SubstepKind> kinetic = {SubstepKind::stream};
  if (formalism != Formalism::kvn) kinetic.push_back(SubstepKind::kinetic_phase);
  if (formalism == Formalism::hybrid) kinetic.push_back(SubstepKind::quantum_kinetic);

  std::vector<Substep> middle;
  if (h.potential != PotentialKind::free) {
    const bool phase = formalism != Formalism::kvn;
    if (phase) middle.push_back({SubstepKind::potential_phase, 0.5});
    if (!drop_force) middle.push_back({SubstepKind::kick, 1.0});
    if (phase) middle.push_back({SubstepKind::potential_phase, 0.5});
  }

  PropagatorPlan plan{formalism, h, dt, drop_force, {}};
  for (auto k : kinetic) push_merged(plan.substeps, {k, 0.5});
  for (auto s : middle) push_merged(plan.substeps, s);
  for (auto it = kinetic.rbegin(); it != kinetic.rend(); ++it) push_merged(plan.substeps, {*it, 0.5});
  return plan;
}

std::vector<Substep> fuse(const std::vector<Substep>& seq) {
  std::vector<Substep> out;
  std::size_t i = 0;
  while (i < seq.size()) {
    const bool group = kinetic_group(seq[i].kind);
    std::map<SubstepKind, double> total;
    std::size_t j = i;
    for (; j < seq.size() && kinetic_group(seq[j].kind) == group; ++j) total[seq[j].kind] += seq[j].fraction;
    for (auto& [k, f] : total) {
      if (pointwise(k)) out.push_back({k, f / 2});
    }
    for (auto& [k, f] : total) {
      if (!pointwise(k)) out.push_back({k, f});
    }
    for (auto& [k, f] : total) {
      if (pointwise(k)) out.push_back({k, f / 2});
    }
    i = j;
  }
  std::vector<Substep> merged;
  for (auto s : out) push_merged(merged, s);
  return merged;
}

// ---------------------------------------------------------------------------
// propagator

struct Propagator::Tables {
  std::vector<std::vector<cplx>> parts;
};

void check_compatible(const PropagatorPlan& plan, const GridSpec& grid) {
  const auto pairs = classical_pairs(grid);
  const auto x_axes = grid.axes_with_role(Role::x);
  if (pairs.empty()) throw std::invalid_argument("propagator: grid needs at least one (q, p) pair");
  if (plan.formalism == Formalism::hybrid && x_axes.empty()) {
    throw std::invalid_argument("propagator: hybrid formalism needs an x axis");
  }
  if (plan.formalism != Formalism::hybrid && !x_axes.empty()) {
    throw std::invalid_argument("propagator: x axes need the hybrid formalism");
  }
  const auto& masses = plan.hamiltonian.masses;
  if (masses.size() != pairs.size() + x_axes.size()) {
    throw std::invalid_argument("propagator: expected " + std::to_string(pairs.size() + x_axes.size()) +
                                " masses, got " + std::to_string(masses.size()));
  }
  for (double m : masses) {
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("propagator: masses must be positive");
  }
  std::vector<std::string> q_names;
  std::vector<std::string> x_names;
  for (auto [qa, pa] : pairs) q_names.push_back(grid.axis(qa).name);
  for (auto xa : x_axes) x_names.push_back(grid.axis(xa).name);
  potential_polynomial(plan.hamiltonian, q_names, x_names);
}

Propagator::Propagator(PropagatorPlan plan, GridSpec grid) : plan_(std::move(plan)), grid_(std::move(grid)) {
  check_compatible(plan_, grid_);
  pairs_ = classical_pairs(grid_);
  x_axes_ = grid_.axes_with_role(Role::x);
  const auto& masses = plan_.hamiltonian.masses;
  classical_mass_.assign(masses.begin(), masses.begin() + static_cast<std::ptrdiff_t>(pairs_.size()));
  quantum_mass_.assign(masses.begin() + static_cast<std::ptrdiff_t>(pairs_.size()), masses.end());

  std::vector<std::string> q_names;
  std::vector<std::string> x_names;
  for (auto [qa, pa] : pairs_) q_names.push_back(grid_.axis(qa).name);
  for (auto xa : x_axes_) x_names.push_back(grid_.axis(xa).name);
  potential_ = std::make_unique<CPoly>(potential_polynomial(plan_.hamiltonian, q_names, x_names));

  for (std::size_t a = 0; a < grid_.rank(); ++a) {
    if (grid_.axis(a).role != Role::p) position_axes_.push_back(a);
  }
  position_strides_.assign(position_axes_.size(), 1);
  for (std::size_t k = position_axes_.size(); k-- > 0;) {
    position_strides_[k] = position_size_;
    position_size_ *= grid_.axis(position_axes_[k]).points;
  }

  std::vector<CPoly> gradient;
  for (const auto& n : q_names) gradient.push_back(potential_->partial(n));
  v_values_.resize(position_size_);
  v_gradient_.assign(pairs_.size(), std::vector<double>(position_size_));
  std::map<std::string, std::complex<double>, std::less<>> env;
  for (std::size_t s = 0; s < position_size_; ++s) {
    for (std::size_t k = 0; k < position_axes_.size(); ++k) {
      const auto& ax = grid_.axis(position_axes_[k]);
      env[ax.name] = ax.coordinate(s / position_strides_[k] % ax.points);
    }
    v_values_[s] = potential_->eval(env).real();
    for (std::size_t i = 0; i < pairs_.size(); ++i) v_gradient_[i][s] = gradient[i].eval(env).real();
  }

  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    double fmax = 0.0;
    for (double g : v_gradient_[i]) fmax = std::max(fmax, std::abs(g));
    const auto& p_axis = grid_.axis(pairs_[i].second);
    if (fmax * plan_.dt > 0.5 * p_axis.extent) {
      std::ostringstream msg;
      msg << "dt: max|dV/d" << q_names[i] << "| * dt = " << fmax * plan_.dt << " exceeds half the extent of axis '"
          << p_axis.name << "'; momentum wraps within one step";
      warnings_.push_back(msg.str());
    }
  }
}

Propagator::~Propagator() = default;

std::size_t Propagator::position_index(std::size_t flat) const {
  std::size_t s = 0;
  for (std::size_t k = 0; k < position_axes_.size(); ++k) {
    s += grid_.index_along(flat, position_axes_[k]) * position_strides_[k];
  }
  return s;
}

const Propagator::Tables& Propagator::tables(const Substep& s) const {
  std::lock_guard lock(cache_mutex_);
  auto key = std::pair{static_cast<int>(s.kind), s.fraction};
  if (auto it = cache_.find(key); it != cache_.end()) return *it->second;

  auto t = std::make_unique<Tables>();
  const double tau = s.fraction * plan_.dt;
  switch (s.kind) {
    case SubstepKind::stream:
      for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const auto& q = grid_.axis(pairs_[i].first);
        const auto& p = grid_.axis(pairs_[i].second);
        std::vector<cplx> part(p.points * q.points);
        for (std::size_t pi = 0; pi < p.points; ++pi) {
          const double shift = p.coordinate(pi) * tau / classical_mass_[i];
          for (std::size_t j = 0; j < q.points; ++j) part[pi * q.points + j] = shift_factor(q, j, shift);
        }
        t->parts.push_back(std::move(part));
      }
      break;
    case SubstepKind::kinetic_phase:
      for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const auto& p = grid_.axis(pairs_[i].second);
        std::vector<cplx> part(p.points);
        for (std::size_t pi = 0; pi < p.points; ++pi) {
          const double pv = p.coordinate(pi);
          part[pi] = std::polar(1.0, tau * pv * pv / (2.0 * classical_mass_[i]));
        }
        t->parts.push_back(std::move(part));
      }
      break;
    case SubstepKind::quantum_kinetic:
      for (std::size_t i = 0; i < x_axes_.size(); ++i) {
        const auto& x = grid_.axis(x_axes_[i]);
        std::vector<cplx> part(x.points);
        for (std::size_t j = 0; j < x.points; ++j) {
          const double k = x.wavenumber(j);
          part[j] = std::polar(1.0, -tau * k * k / (2.0 * quantum_mass_[i]));
        }
        t->parts.push_back(std::move(part));
      }
      break;
    case SubstepKind::potential_phase: {
      std::vector<cplx> part(position_size_);
      for (std::size_t s2 = 0; s2 < position_size_; ++s2) part[s2] = std::polar(1.0, -tau * v_values_[s2]);
      t->parts.push_back(std::move(part));
      break;
    }
    case SubstepKind::kick:
      for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const auto& p = grid_.axis(pairs_[i].second);
        std::vector<cplx> part(position_size_ * p.points);
        for (std::size_t s2 = 0; s2 < position_size_; ++s2) {
          const double shift = -tau * v_gradient_[i][s2];
          for (std::size_t j = 0; j < p.points; ++j) part[s2 * p.points + j] = shift_factor(p, j, shift);
        }
        t->parts.push_back(std::move(part));
      }
      break;
  }
  return *cache_.emplace(key, std::move(t)).first->second;
}

void Propagator::apply(Wavefunction& w, const Substep& s) const {
  if (!(w.grid() == grid_)) throw GridError("propagator: wavefunction grid does not match");
  const Tables& t = tables(s);
  switch (s.kind) {
    case SubstepKind::stream:
      for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const auto [qa, pa] = pairs_[i];
        const std::size_t n = grid_.axis(qa).points;
        const cplx* part = t.parts[i].data();
        transform_lines(w, qa, [&, pa = pa](std::size_t base, cplx* spec) {
          const cplx* row = part + grid_.index_along(base, pa) * n;
          for (std::size_t j = 0; j < n; ++j) spec[j] *= row[j];
        });
      }
      break;
    case SubstepKind::quantum_kinetic:
      for (std::size_t i = 0; i < x_axes_.size(); ++i) {
        const std::size_t n = grid_.axis(x_axes_[i]).points;
        const cplx* part = t.parts[i].data();
        transform_lines(w, x_axes_[i], [&](std::size_t, cplx* spec) {
          for (std::size_t j = 0; j < n; ++j) spec[j] *= part[j];
        });
      }
      break;
    case SubstepKind::kick:
      for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const std::size_t pa = pairs_[i].second;
        const std::size_t n = grid_.axis(pa).points;
        const cplx* part = t.parts[i].data();
        transform_lines(w, pa, [&](std::size_t base, cplx* spec) {
          const cplx* row = part + position_index(base) * n;
          for (std::size_t j = 0; j < n; ++j) spec[j] *= row[j];
        });
      }
      break;
    case SubstepKind::kinetic_phase:
      parallel_for(w.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) {
          cplx f = 1.0;
          for (std::size_t i = 0; i < pairs_.size(); ++i) f *= t.parts[i][grid_.index_along(c, pairs_[i].second)];
          w[c] *= f;
        }
      });
      break;
    case SubstepKind::potential_phase:
      parallel_for(w.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) w[c] *= t.parts[0][position_index(c)];
      });
      break;
  }
}

void Propagator::step(Wavefunction& w) const {
  for (const auto& s : plan_.substeps) apply(w, s);
}

void Propagator::advance(Wavefunction& w, std::size_t steps) const {
  if (steps == 0) return;
  std::vector<Substep> seq;
  seq.reserve(steps * plan_.substeps.size());
  for (std::size_t k = 0; k < steps; ++k) seq.insert(seq.end(), plan_.substeps.begin(), plan_.substeps.end());
  for (const auto& s : fuse(seq)) apply(w, s);
}

Observables Propagator::observe(const Wavefunction& w, double t) const {
  Observables o;
  o.t = t;
  double norm = 0.0;
  double q = 0.0;
  double p = 0.0;
  double energy = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) {
    const double d = std::norm(w[c]);
    if (d == 0.0) continue;
    norm += d;
    double h = v_values_[position_index(c)];
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      const double qv = grid_.coordinate(c, pairs_[i].first);
      const double pv = grid_.coordinate(c, pairs_[i].second);
      q += d * qv;
      p += d * pv;
      h += pv * pv / (2.0 * classical_mass_[i]);
    }
    energy += d * h;
  }
  const double weight = grid_.cell_weight();
  o.norm = norm * weight;
  o.q_mean = q * weight / o.norm;
  o.p_mean = p * weight / o.norm;
  o.energy = energy * weight / o.norm;
  for (std::size_t i = 0; i < x_axes_.size(); ++i) {
    const double m = quantum_mass_[i];
    o.k_mean += spectral_moment(w, x_axes_[i], [](double k) { return k; }) / o.norm;
    o.energy += spectral_moment(w, x_axes_[i], [m](double k) { return k * k / (2.0 * m); }) / o.norm;
  }
  o.im_max = max_imag(w);
  o.leakage = leakage(w);
  return o;
}

Wavefunction step(const Wavefunction& w, const Propagator& prop) {
  Wavefunction out = w;
  prop.step(out);
  return out;
}

std::size_t step_count(double t_final, double dt) {
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("t_final must be finite and >= 0");
  const double r = t_final / dt;
  const double n = std::round(r);
  if (std::abs(r - n) > 1e-9 * std::max(1.0, r)) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "t_final " << t_final << " is not an integer multiple of dt " << dt;
    throw std::invalid_argument(msg.str());
  }
  return static_cast<std::size_t>(n);
}

namespace {

bool finite(const Observables& o) {
  for (double v : {o.norm, o.q_mean, o.p_mean, o.k_mean, o.energy, o.im_max, o.leakage}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

RunResult run(const Wavefunction& w0, const Propagator& prop, double t_final, std::size_t sample_every,
              const std::function<void(std::size_t, const Wavefunction&)>& on_sample) {
  const std::size_t n = step_count(t_final, prop.plan().dt);
  RunResult result{{}, w0};
  Wavefunction& w = result.final_state;
  std::size_t done = 0;
  std::size_t index = 0;
  auto sample = [&] {
    auto o = prop.observe(w, static_cast<double>(done) * prop.plan().dt);
    if (!finite(o)) {
      throw NumericalAbort(done, "non-finite amplitude detected at step " + std::to_string(done));
    }
    result.record.samples.push_back(o);
    if (on_sample) on_sample(index, w);
    ++index;
  };
  sample();
  while (done < n) {
    const std::size_t chunk = sample_every == 0 ? n - done : std::min(sample_every, n - done);
    prop.advance(w, chunk);
    done += chunk;
    sample();
  }
  return result;
}

void RunRecord::write_csv(std::ostream& os) const {
  os << "t,norm,q_mean,p_mean,k_mean,energy,im_max,leakage\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (const auto& s : samples) {
    line.str("");
    line << s.t << ',' << s.norm << ',' << s.q_mean << ',' << s.p_mean << ',' << s.k_mean << ',' << s.energy << ','
         << s.im_max << ',' << s.leakage << '\n';
    os << line.str();
  }
}

}  // namespace kvh

#include "kvh/galilei_action.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "kvh/evolve.hpp"

namespace kvh {

std::string to_string(GroupKind k) {
  switch (k) {
    case GroupKind::translation: return "translation";
    case GroupKind::momentum_translation: return "momentum_translation";
    case GroupKind::boost: return "boost";
    case GroupKind::free_time: return "free_time";
    case GroupKind::rotation: return "rotation";
  }
  return "?";
}

GroupKind parse_group_kind(std::string_view s) {
  for (auto k : {GroupKind::translation, GroupKind::momentum_translation, GroupKind::boost, GroupKind::free_time,
                 GroupKind::rotation}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown group element '" + std::string(s) +
                              "' (expected translation, momentum_translation, boost, free_time or rotation)");
}

std::string GroupElement::str() const {
  std::ostringstream os;
  os << to_string(kind) << '(';
  switch (kind) {
    case GroupKind::translation: os << "a=" << parameter; break;
    case GroupKind::momentum_translation: os << "b=" << parameter; break;
    case GroupKind::boost: os << "v=" << parameter << " t=" << time; break;
    case GroupKind::free_time: os << "t=" << parameter; break;
    case GroupKind::rotation: os << "theta=" << parameter; break;
  }
  os << ')';
  return os.str();
}

GroupElement inverse(const GroupElement& g) {
  GroupElement r = g;
  r.parameter = -g.parameter;
  return r;
}

namespace {

std::pair<std::size_t, std::size_t> first_pair(const GridSpec& g) {
  auto pairs = classical_pairs(g);
  if (pairs.empty()) throw GridError("group action needs a (q, p) pair");
  return pairs.front();
}

void require_formalism(const GroupElement& g) {
  if (g.formalism != Formalism::kvn && g.formalism != Formalism::kvh) {
    throw std::invalid_argument("group action: formalism must be kvn or kvh");
  }
  if (!(g.mass > 0.0)) throw std::invalid_argument("group action: mass must be positive");
}

}  // namespace

Wavefunction act(const GroupElement& g, const Wavefunction& w) {
  require_formalism(g);
  const auto [qa, pa] = first_pair(w.grid());
  const auto& grid = w.grid();
  const bool kvh = g.formalism == Formalism::kvh;
  const double m = g.mass;
  Wavefunction out = w;
  switch (g.kind) {
    case GroupKind::translation:
      shift(out, qa, g.parameter);
      break;
    case GroupKind::momentum_translation:
      shift(out, pa, g.parameter);
      break;
    case GroupKind::boost: {
      const double v = g.parameter;
      const double t = g.time;
      if (t != 0.0) shift(out, qa, v * t);
      shift(out, pa, m * v);
      if (kvh) {
        for (std::size_t c = 0; c < out.size(); ++c) {
          out[c] *= std::polar(1.0, m * grid.coordinate(c, qa) * v - 0.5 * m * t * v * v);
        }
      }
      break;
    }
    case GroupKind::free_time: {
      const double t = g.parameter;
      shift_lines(out, qa, [&, pa = pa](std::size_t base) { return grid.coordinate(base, pa) * t / m; });
      if (kvh) {
        for (std::size_t c = 0; c < out.size(); ++c) {
          const double p = grid.coordinate(c, pa);
          out[c] *= std::polar(1.0, p * p * t / (2.0 * m));
        }
      }
      break;
    }
    case GroupKind::rotation:
      throw std::invalid_argument("rotations are verified symbolically only; no grid action");
  }
  return out;
}

namespace {

// The anti-Hermitian exponent X with act(g) = exp(X).
NCPoly exponent(const AlgebraPtr& alg, const GroupElement& g) {
  const auto q = alg->sym("q");
  const auto p = alg->sym("p");
  const auto m = alg->sym("m");
  auto rule = [&](const CPoly& f) { return g.formalism == Formalism::kvh ? kvh_map(alg, f) : kvn_map(alg, f); };
  const auto i = GaussianRational::i();
  const auto num = [](double x) { return GaussianRational::from_double(x); };
  switch (g.kind) {
    case GroupKind::translation:
      return (-i * num(g.parameter)) * rule(p);
    case GroupKind::momentum_translation:
      return (-i * num(g.parameter)) * NCPoly::generator(alg, {Sector::classical, GeneratorKind::lam_mom, 1, 1});
    case GroupKind::boost:
      return (i * num(g.parameter)) * rule(m * q - num(g.time) * p);
    case GroupKind::free_time:
      return (-i * num(g.parameter)) * rule(GaussianRational::ratio(1, 2) * alg->sym("m", -1) * p.pow(2));
    case GroupKind::rotation:
      break;
  }
  throw std::invalid_argument("rotations have no one-dimensional exponent");
}

}  // namespace

std::optional<std::complex<double>> predicted_phase(const GroupElement& g1, const GroupElement& g2) {
  if (g1.formalism != g2.formalism || g1.mass != g2.mass) {
    throw std::invalid_argument("predicted_phase: elements differ in formalism or mass");
  }
  auto alg = make_algebra(Layout::single_classical(1));
  auto c = commutator(exponent(alg, g1), exponent(alg, g2));
  auto value = c.central_value();
  if (!value) return std::nullopt;
  return std::exp(value->eval({{"m", g1.mass}, {"t", 0.0}}));
}

double WeylResult::phase_error() const {
  if (!predicted) return std::numeric_limits<double>::infinity();
  return std::abs(std::remainder(std::arg(phase) - std::arg(*predicted), 2 * std::numbers::pi));
}

namespace {

std::pair<std::complex<double>, double> fit_phase(const Wavefunction& u, const Wavefunction& v) {
  const auto overlap = inner_product(v, u);
  const std::complex<double> phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : 1.0;
  return {phase, std::sqrt((u - phase * v).norm())};
}

}  // namespace

WeylResult weyl_phase(const GroupElement& g1, const GroupElement& g2, const Wavefunction& w) {
  const auto u = act(g1, act(g2, w));
  const auto v = act(g2, act(g1, w));
  auto [phase, residual] = fit_phase(u, v);
  return {phase, residual, predicted_phase(g1, g2)};
}

CovarianceResult covariance_check(Formalism formalism, double mass, double v, double t, const Wavefunction& w0) {
  if (formalism != Formalism::kvn && formalism != Formalism::kvh) {
    throw std::invalid_argument("covariance_check: formalism must be kvn or kvh");
  }
  auto evolve = [&](const Wavefunction& w) {
    if (t == 0.0) return w;
    Hamiltonian h{{mass}, PotentialKind::free, 0.0, {}};
    Propagator prop(build_plan(formalism, h, t), w.grid());
    return step(w, prop);
  };
  const auto path1 = evolve(act(GroupElement::boost(v, 0.0, formalism, mass), w0));
  const auto path2 = act(GroupElement::boost(v, t, formalism, mass), evolve(w0));
  auto [phase, residual] = fit_phase(path1, path2);
  return {phase, residual};
}

void write_action_csv(std::ostream& os, const std::vector<ActionRow>& rows) {
  os << "formalism,g1,g2,params,phase_re,phase_im,predicted_phase,residual\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (const auto& r : rows) {
    line.str("");
    line << r.formalism << ',' << r.g1 << ',' << r.g2 << ",\"" << r.params << "\"," << r.phase.real() << ','
         << r.phase.imag() << ',';
    if (std::isnan(r.predicted_phase)) {
      line << "nan";
    } else {
      line << r.predicted_phase;
    }
    line << ',' << r.residual << '\n';
    os << line.str();
  }
}

}  // namespace kvh

#include "kvh/characteristics_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace kvh {

double FlowHamiltonian::potential(double q) const {
  double v = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * q + *it;
  return v;
}

double FlowHamiltonian::slope(double q) const {
  double v = 0.0;
  for (std::size_t n = coefficients.size(); n-- > 1;) v = v * q + static_cast<double>(n) * coefficients[n];
  return v;
}

FlowHamiltonian flow_hamiltonian(const Hamiltonian& h) {
  if (h.masses.size() != 1) throw std::invalid_argument("oracle: exactly one classical particle is supported");
  FlowHamiltonian f{h.masses[0], {}};
  switch (h.potential) {
    case PotentialKind::free: break;
    case PotentialKind::harmonic: f.coefficients = {0.0, 0.0, h.kappa / 2}; break;
    case PotentialKind::quartic: f.coefficients = {0.0, 0.0, 0.0, 0.0, h.kappa / 4}; break;
    case PotentialKind::polynomial: f.coefficients = h.coefficients; break;
    default: throw std::invalid_argument("oracle: potential '" + to_string(h.potential) + "' is not single-particle");
  }
  return f;
}

namespace {

struct Rate {
  double dq, dp, ds;
};

Rate rate(const FlowHamiltonian& h, double q, double p) {
  return {p / h.mass, -h.slope(q), p * p / (2.0 * h.mass) - h.potential(q)};
}

PhasePoint rk4(const FlowHamiltonian& h, PhasePoint z, double dt) {
  const Rate k1 = rate(h, z.q, z.p);
  const Rate k2 = rate(h, z.q + 0.5 * dt * k1.dq, z.p + 0.5 * dt * k1.dp);
  const Rate k3 = rate(h, z.q + 0.5 * dt * k2.dq, z.p + 0.5 * dt * k2.dp);
  const Rate k4 = rate(h, z.q + dt * k3.dq, z.p + dt * k3.dp);
  z.q += dt / 6.0 * (k1.dq + 2 * k2.dq + 2 * k3.dq + k4.dq);
  z.p += dt / 6.0 * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp);
  z.action += dt / 6.0 * (k1.ds + 2 * k2.ds + 2 * k3.ds + k4.ds);
  return z;
}

}  // namespace

PhasePoint flow(const FlowHamiltonian& h, PhasePoint start, double t, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("flow: steps must be positive");
  const double dt = t / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) start = rk4(h, start, dt);
  return start;
}

TrajectoryBundle integrate_flow(const FlowHamiltonian& h, const std::vector<std::pair<double, double>>& seeds,
                                double t_final, std::size_t steps, std::size_t sample_every, double tolerance) {
  if (steps == 0) throw std::invalid_argument("integrate_flow: steps must be positive");
  TrajectoryBundle b;
  b.seeds = seeds;
  const double dt = t_final / static_cast<double>(steps);
  b.times.push_back(0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    if ((sample_every != 0 && k % sample_every == 0) || k == steps) b.times.push_back(static_cast<double>(k) * dt);
  }
  for (auto [q0, p0] : seeds) {
    std::vector<PhasePoint> row{{q0, p0, 0.0}};
    PhasePoint z{q0, p0, 0.0};
    const double e0 = h.energy(q0, p0);
    const double scale = std::max(1.0, std::abs(e0));
    for (std::size_t k = 1; k <= steps; ++k) {
      z = rk4(h, z, dt);
      b.max_energy_drift = std::max(b.max_energy_drift, std::abs(h.energy(z.q, z.p) - e0) / scale);
      if ((sample_every != 0 && k % sample_every == 0) || k == steps) row.push_back(z);
    }
    b.samples.push_back(std::move(row));
  }
  b.flagged = b.max_energy_drift > tolerance;
  return b;
}

void TrajectoryBundle::write_csv(std::ostream& os, const FlowHamiltonian& h) const {
  os << "seed_q,seed_p,t,q,p,S,energy\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto& z = samples[s][k];
      line.str("");
      line << seeds[s].first << ',' << seeds[s].second << ',' << times[k] << ',' << z.q << ',' << z.p << ','
           << z.action << ',' << h.energy(z.q, z.p) << '\n';
      os << line.str();
    }
  }
}

std::string to_string(Interpolation i) { return i == Interpolation::cubic ? "cubic" : "lagrange8"; }

Interpolation parse_interpolation(std::string_view s) {
  if (s == "cubic") return Interpolation::cubic;
  if (s == "lagrange8") return Interpolation::lagrange8;
  throw std::invalid_argument("unknown interpolation '" + std::string(s) + "' (expected cubic or lagrange8)");
}

namespace {

void require_plane(const GridSpec& g) {
  if (g.rank() != 2 || g.axis(0).role != Role::q || g.axis(1).role != Role::p) {
    throw GridError("oracle: grid must be exactly (q, p)");
  }
}

// Lagrange weights on nodes first..first+n-1 (in units of the spacing) at position s.
void stencil(double s, int n, long& first, std::vector<double>& weights) {
  const long base = static_cast<long>(std::floor(s));
  first = base - (n / 2 - 1);
  weights.assign(static_cast<std::size_t>(n), 1.0);
  for (int i = 0; i < n; ++i) {
    const double xi = static_cast<double>(first + i);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double xj = static_cast<double>(first + j);
      weights[static_cast<std::size_t>(i)] *= (s - xj) / (xi - xj);
    }
  }
}

long wrap(long i, long n) { return ((i % n) + n) % n; }

bool inside(const Axis& a, double x) { return x >= a.min && x < a.min + a.extent; }

}  // namespace

cplx interpolate(const Wavefunction& w, double q, double p, Interpolation order) {
  const auto& g = w.grid();
  require_plane(g);
  const int n = order == Interpolation::cubic ? 4 : 8;
  const auto& aq = g.axis(0);
  const auto& ap = g.axis(1);
  long fq = 0;
  long fp = 0;
  std::vector<double> wq;
  std::vector<double> wp;
  stencil((q - aq.min) / aq.spacing(), n, fq, wq);
  stencil((p - ap.min) / ap.spacing(), n, fp, wp);
  const auto nq = static_cast<long>(aq.points);
  const auto np = static_cast<long>(ap.points);
  cplx sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(wrap(fq + i, nq)) * ap.points;
    cplx inner = 0.0;
    for (int j = 0; j < n; ++j) inner += wp[static_cast<std::size_t>(j)] * w[row + static_cast<std::size_t>(wrap(fp + j, np))];
    sum += wq[static_cast<std::size_t>(i)] * inner;
  }
  return sum;
}

namespace {

Reference backward(const GridSpec& grid, const std::function<cplx(double, double)>& value, const FlowHamiltonian& h,
                   double t, Formalism formalism, std::size_t steps) {
  require_plane(grid);
  if (formalism != Formalism::kvn && formalism != Formalism::kvh) {
    throw std::invalid_argument("oracle: formalism must be kvn or kvh");
  }
  Reference r{Wavefunction(grid), std::vector<std::uint8_t>(grid.size(), 1), 0};
  const auto& aq = grid.axis(0);
  const auto& ap = grid.axis(1);
  std::vector<std::uint8_t> bad(grid.size(), 0);
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      const double q = grid.coordinate(c, 0);
      const double p = grid.coordinate(c, 1);
      PhasePoint z{q, p, 0.0};
      if (t != 0.0) z = flow(h, z, -t, steps);
      if (!inside(aq, z.q) || !inside(ap, z.p)) {
        bad[c] = 1;
        continue;
      }
      cplx v = value(z.q, z.p);
      // backward integration accumulates -S
      if (formalism == Formalism::kvh) v *= std::polar(1.0, -z.action);
      r.psi[c] = v;
    }
  });
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (bad[c]) {
      r.valid[c] = 0;
      ++r.flagged;
    }
  }
  return r;
}

}  // namespace

Reference reference_solution(const GridSpec& grid, const std::function<cplx(double, double)>& psi0,
                             const FlowHamiltonian& h, double t, Formalism formalism, std::size_t steps) {
  return backward(grid, psi0, h, t, formalism, steps);
}

Reference reference_solution(const Wavefunction& psi0, const FlowHamiltonian& h, double t, Formalism formalism,
                             std::size_t steps, Interpolation order) {
  return backward(
      psi0.grid(), [&](double q, double p) { return interpolate(psi0, q, p, order); }, h, t, formalism, steps);
}

CompareMetrics compare(const Wavefunction& a, const Wavefunction& b, double mask_threshold,
                       const std::vector<std::uint8_t>* valid) {
  if (!(a.grid() == b.grid())) throw GridError("compare: grid mismatch");
  auto use = [&](std::size_t i) { return valid == nullptr || (*valid)[i] != 0; };
  CompareMetrics m;
  cplx overlap = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!use(i)) continue;
    overlap += std::conj(a[i]) * b[i];
    peak = std::max(peak, std::abs(a[i]));
  }
  m.global_phase = std::abs(overlap) > 0.0 ? std::arg(overlap) : 0.0;
  const cplx undo = std::polar(1.0, -m.global_phase);
  const double cut = mask_threshold * peak;
  double l2 = 0.0;
  double l2a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!use(i)) continue;
    const cplx d = b[i] - a[i];
    const cplx da = b[i] * undo - a[i];
    l2 += std::norm(d);
    l2a += std::norm(da);
    if (std::abs(a[i]) <= cut) continue;
    ++m.masked_cells;
    m.linf = std::max(m.linf, std::abs(d));
    m.linf_aligned = std::max(m.linf_aligned, std::abs(da));
    m.modulus_linf = std::max(m.modulus_linf, std::abs(std::abs(b[i]) - std::abs(a[i])));
    const double raw = std::arg(b[i]) - std::arg(a[i]);
    m.phase_linf = std::max(m.phase_linf, std::abs(std::remainder(raw, 2 * std::numbers::pi)));
    m.phase_linf_aligned =
        std::max(m.phase_linf_aligned, std::abs(std::remainder(raw - m.global_phase, 2 * std::numbers::pi)));
  }
  m.l2 = std::sqrt(l2 * a.grid().cell_weight());
  m.l2_aligned = std::sqrt(l2a * a.grid().cell_weight());
  return m;
}

}  // namespace kvh

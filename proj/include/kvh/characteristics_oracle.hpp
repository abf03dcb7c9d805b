#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "kvh/evolve.hpp"
#include "kvh/phasespace_grid.hpp"

namespace kvh {

/// One particle in one dimension, V(q) = sum_n c_n q^n evaluated by Horner.
/// Deliberately independent of CPoly so the oracle shares no code path with
/// the propagator's potential.
struct FlowHamiltonian {
  double mass = 1.0;
  std::vector<double> coefficients;

  double potential(double q) const;
  double slope(double q) const;  // dV/dq
  double energy(double q, double p) const { return p * p / (2.0 * mass) + potential(q); }
};

/// Coefficients for the single-particle potentials of evolve.
FlowHamiltonian flow_hamiltonian(const Hamiltonian& h);

struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
  double action = 0.0;
};

/// Classical RK4 on (q, p, S) with S' = p^2/2m - V. Negative t flows backward.
PhasePoint flow(const FlowHamiltonian& h, PhasePoint start, double t, std::size_t steps);

struct TrajectoryBundle {
  std::vector<std::pair<double, double>> seeds;
  std::vector<double> times;
  std::vector<std::vector<PhasePoint>> samples;  // [seed][time]
  double max_energy_drift = 0.0;                 // relative
  bool flagged = false;                          // drift above tolerance

  void write_csv(std::ostream& os, const FlowHamiltonian& h) const;
};

/// Samples every `sample_every` steps (0: only the end points).
TrajectoryBundle integrate_flow(const FlowHamiltonian& h, const std::vector<std::pair<double, double>>& seeds,
                                double t_final, std::size_t steps, std::size_t sample_every = 0,
                                double tolerance = 1e-8);

enum class Interpolation { cubic, lagrange8 };

std::string to_string(Interpolation i);
Interpolation parse_interpolation(std::string_view s);

/// Periodic tensor Lagrange interpolation of grid data on a (q, p) grid.
cplx interpolate(const Wavefunction& w, double q, double p, Interpolation order);

struct Reference {
  Wavefunction psi;
  std::vector<std::uint8_t> valid;  // 0 where the backward trajectory left the grid
  std::size_t flagged = 0;
};

/// psi(z, t) = psi0(Phi_{-t}(z)), times exp(iS) for KvH. The grid must be a
/// single (q, p) pair.
Reference reference_solution(const GridSpec& grid, const std::function<cplx(double q, double p)>& psi0,
                             const FlowHamiltonian& h, double t, Formalism formalism, std::size_t steps);
Reference reference_solution(const Wavefunction& psi0, const FlowHamiltonian& h, double t, Formalism formalism,
                             std::size_t steps, Interpolation order = Interpolation::cubic);

struct CompareMetrics {
  double l2 = 0.0;
  double l2_aligned = 0.0;  // after removing the best-fit global phase
  double linf = 0.0;        // masked
  double linf_aligned = 0.0;
  double modulus_linf = 0.0;
  double phase_linf = 0.0;  // masked, wrapped to (-pi, pi]
  double phase_linf_aligned = 0.0;
  double global_phase = 0.0;  // b ~ exp(i global_phase) a
  std::size_t masked_cells = 0;
};

/// `a` is the reference. Cells count where |a| > mask_threshold * max|a| and,
/// when given, valid[i] != 0.
CompareMetrics compare(const Wavefunction& a, const Wavefunction& b, double mask_threshold = 1e-6,
                       const std::vector<std::uint8_t>* valid = nullptr);

}  // namespace kvh

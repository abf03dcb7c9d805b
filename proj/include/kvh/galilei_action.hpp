#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kvh/ccr_algebra.hpp"
#include "kvh/phasespace_grid.hpp"

namespace kvh {

enum class GroupKind { translation, momentum_translation, boost, free_time, rotation };

std::string to_string(GroupKind k);
GroupKind parse_group_kind(std::string_view s);

/// Finite Galilei transformation of one classical particle in one dimension,
/// acting on the first (q, p) pair of a grid.
///   translation(a)           exp(-i a lq)        psi(q - a, p)
///   momentum_translation(b)  exp(-i b lp)        psi(q, p - b)
///   boost(v, t)              exp(+i v G(t))      psi(q - v t, p - m v), KvH times exp(i(m q v - m t v^2/2))
///   free_time(t)             exp(-i t L)         psi(q - t p/m, p), KvH times exp(+i p^2 t/2m)
/// Rotations exist only symbolically; act() rejects them.
struct GroupElement {
  GroupKind kind = GroupKind::translation;
  double parameter = 0.0;  // a, b, v, t or theta
  double time = 0.0;       // boost evaluation time
  Formalism formalism = Formalism::kvh;
  double mass = 1.0;

  static GroupElement translation(double a, Formalism f, double m = 1.0) { return {GroupKind::translation, a, 0.0, f, m}; }
  static GroupElement momentum_translation(double b, Formalism f, double m = 1.0) {
    return {GroupKind::momentum_translation, b, 0.0, f, m};
  }
  static GroupElement boost(double v, double t, Formalism f, double m = 1.0) { return {GroupKind::boost, v, t, f, m}; }
  static GroupElement free_time(double t, Formalism f, double m = 1.0) { return {GroupKind::free_time, t, 0.0, f, m}; }

  std::string str() const;
};

/// Parameter negation at matched time.
GroupElement inverse(const GroupElement& g);

Wavefunction act(const GroupElement& g, const Wavefunction& w);

/// exp of the commutator of the two exponents, computed with ccr_algebra;
/// empty when the commutator is not central.
std::optional<std::complex<double>> predicted_phase(const GroupElement& g1, const GroupElement& g2);

struct WeylResult {
  std::complex<double> phase;
  double residual = 0.0;
  std::optional<std::complex<double>> predicted;

  /// |measured - predicted| in radians (infinite without a prediction).
  double phase_error() const;
  bool central() const { return residual <= 1e-6; }
};

/// u = act(g1, act(g2, w)), v = act(g2, act(g1, w)); phase = <v,u>/|<v,u>|,
/// residual = ||u - phase v||.
WeylResult weyl_phase(const GroupElement& g1, const GroupElement& g2, const Wavefunction& w);

struct CovarianceResult {
  std::complex<double> phase;
  double residual = 0.0;
};

/// Free evolution for time t after boost(v, 0), against boost(v, t) after
/// free evolution.
CovarianceResult covariance_check(Formalism formalism, double mass, double v, double t, const Wavefunction& w0);

struct ActionRow {
  std::string formalism;
  std::string g1;
  std::string g2;
  std::string params;
  std::complex<double> phase;
  double predicted_phase = 0.0;  // radians; NaN when there is no prediction
  double residual = 0.0;
};

/// formalism,g1,g2,params,phase_re,phase_im,predicted_phase,residual
void write_action_csv(std::ostream& os, const std::vector<ActionRow>& rows);

}  // namespace kvh

#pragma once

#include <string>
#include <vector>

#include "kvh/ccr_algebra.hpp"

namespace kvh {

// Relation sets checked by `kvh check-algebra`. Each relation carries a
// stable id (family.indices) used in the CSV report.

/// One classical particle in three dimensions, KvN generators: the Galilei
/// table with vanishing central charge.
std::vector<Relation> kvn_galilei_relations();

/// Same table with the KvH boost and Liouvillian; [G*_j, λq_i] = i m δ_ij and
/// the shifted λ*_p commutator.
std::vector<Relation> kvh_galilei_relations();

/// Two interacting classical particles in three dimensions with
/// V = κ |q1 − q2|² / 2: translation and boost covariance, rotational
/// invariance and total-momentum conservation; an external-potential negative
/// control.
std::vector<Relation> two_particle_relations();

/// Classical particle 1 coupled to quantum particle 2 through
/// V = κ |q − x|² / 2, plus the V-only and force-only negative controls.
std::vector<Relation> hybrid_relations();

/// Klein quantization identities: free KvH Liouvillian to k²/2m, the
/// two-particle KvH Liouvillian to the hybrid one, boosts to m x − t k, full
/// quantization to the two-body Schrödinger operator, and commutation with
/// the adjoint.
std::vector<Relation> klein_relations();

enum class SuiteSelection { kvn, kvh, hybrid, all };

SuiteSelection parse_suite_selection(const std::string& name);

std::vector<Relation> galilei_suite(SuiteSelection selection);

}  // namespace kvh

#include "kvh/galilei_suite.hpp"

#include <stdexcept>

namespace kvh {

namespace {

int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return j == i % 3 + 1 ? 1 : -1;
}

std::string idx(int i) { return std::to_string(i); }
std::string idx(int i, int j) { return std::to_string(i) + std::to_string(j); }

std::string bracket(const std::string& a, const std::string& b) { return "[" + a + ", " + b + "]"; }

NCPoly gen(const AlgebraPtr& alg, Sector s, GeneratorKind k, int particle, int axis) {
  return NCPoly::generator(alg, {s, k, particle, axis});
}

GaussianRational imag_unit() { return GaussianRational::i(); }

/// κ/2 Σ_j (a_j − b_j)² over two position-symbol families of the algebra.
CPoly relative_harmonic(const Algebra& alg, int first, int second) {
  CPoly v = alg.zero();
  for (int j = 1; j <= alg.dim(); ++j) {
    v += (alg.sym(alg.position_symbol(first, j)) - alg.sym(alg.position_symbol(second, j))).pow(2);
  }
  return GaussianRational::ratio(1, 2) * alg.sym("kappa") * v;
}

struct Builder {
  std::vector<Relation> out;

  void commutes(std::string id, std::string label, const NCPoly& a, const NCPoly& b, const NCPoly& expected,
                bool expect_holds = true) {
    out.push_back({std::move(id), std::move(label), a, b, expected, expect_holds});
  }
  void equals(std::string id, std::string label, const NCPoly& a, const NCPoly& expected) {
    out.push_back({std::move(id), std::move(label), a, std::nullopt, expected, true});
  }
};

// Galilei table for one particle in three dimensions.
std::vector<Relation> galilei_table(Formalism formalism) {
  const bool kvh = formalism == Formalism::kvh;
  const std::string pre = kvh ? "kvh." : "kvn.";
  const std::string G = kvh ? "G*" : "G";
  const std::string L = kvh ? "L*" : "L";

  auto alg = make_algebra(Layout::single_classical(3));
  const auto gens = galilei_generators(alg, formalism);
  const auto& P = gens.translations;
  const auto& J = gens.rotations;
  const auto& B = gens.boosts;
  const auto& H = gens.time_translation;
  const NCPoly zero(alg);
  const CPoly m = alg->sym("m");

  auto sum_eps = [&](int i, int j, const std::vector<NCPoly>& v) {
    NCPoly r(alg);
    for (int k = 1; k <= 3; ++k) {
      const int e = levi_civita(i, j, k);
      if (e != 0) r += GaussianRational(e) * v[static_cast<std::size_t>(k - 1)];
    }
    return imag_unit() * r;
  };
  auto at = [](const std::vector<NCPoly>& v, int i) -> const NCPoly& { return v[static_cast<std::size_t>(i - 1)]; };

  Builder b;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      b.commutes(pre + "lq_lq." + idx(i, j), bracket("lq_" + idx(i), "lq_" + idx(j)), at(P, i), at(P, j), zero);
    }
  }
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      b.commutes(pre + "G_G." + idx(i, j), bracket(G + "_" + idx(i), G + "_" + idx(j)), at(B, i), at(B, j), zero);
    }
  }
  for (int i = 1; i <= 3; ++i) b.commutes(pre + "J_L." + idx(i), bracket("J_" + idx(i), L), at(J, i), H, zero);
  for (int i = 1; i <= 3; ++i) b.commutes(pre + "lq_L." + idx(i), bracket("lq_" + idx(i), L), at(P, i), H, zero);
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      b.commutes(pre + "J_J." + idx(i, j), bracket("J_" + idx(i), "J_" + idx(j)), at(J, i), at(J, j),
                 sum_eps(i, j, J));
    }
  }
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      b.commutes(pre + "J_lq." + idx(i, j), bracket("J_" + idx(i), "lq_" + idx(j)), at(J, i), at(P, j),
                 sum_eps(i, j, P));
    }
  }
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      b.commutes(pre + "J_G." + idx(i, j), bracket("J_" + idx(i), G + "_" + idx(j)), at(J, i), at(B, j),
                 sum_eps(i, j, B));
    }
  }
  for (int i = 1; i <= 3; ++i) {
    b.commutes(pre + "G_L." + idx(i), bracket(G + "_" + idx(i), L), at(B, i), H, imag_unit() * at(P, i));
  }
  for (int j = 1; j <= 3; ++j) {
    for (int i = 1; i <= 3; ++i) {
      NCPoly charge = kvh && i == j ? NCPoly::scalar(alg, imag_unit() * m) : zero;
      b.commutes(pre + "central." + idx(j, i), bracket(G + "_" + idx(j), "lq_" + idx(i)), at(B, j), at(P, i),
                 charge);
    }
  }
  if (kvh) {
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        // λ*_p = λp + q
        NCPoly lp_star = gen(alg, Sector::classical, GeneratorKind::lam_mom, 1, j) +
                         gen(alg, Sector::classical, GeneratorKind::pos, 1, j);
        NCPoly expected = i == j ? NCPoly::scalar(alg, -imag_unit()) : zero;
        b.commutes(pre + "lq_lpstar." + idx(i, j), bracket("lq_" + idx(i), "lp*_" + idx(j)), at(P, i), lp_star,
                   expected);
      }
    }
  }
  return b.out;
}

}  // namespace

std::vector<Relation> kvn_galilei_relations() { return galilei_table(Formalism::kvn); }

std::vector<Relation> kvh_galilei_relations() { return galilei_table(Formalism::kvh); }

std::vector<Relation> two_particle_relations() {
  auto alg = make_algebra(Layout::pair(3, Sector::classical, Sector::classical, {"kappa"}));
  const CPoly v = relative_harmonic(*alg, 1, 2);
  GeneratorOptions opts;
  opts.potential = v;
  const auto kvh = galilei_generators(alg, Formalism::kvh, opts);
  const auto kvn = galilei_generators(alg, Formalism::kvn, opts);
  const NCPoly zero(alg);
  const CPoly total_mass = alg->sym("m1") + alg->sym("m2");

  Builder b;
  for (int j = 1; j <= 3; ++j) {
    const auto J = static_cast<std::size_t>(j - 1);
    b.commutes("pair.translation." + idx(j), bracket("lq1_" + idx(j) + "+lq2_" + idx(j), "L*"), kvh.translations[J],
               kvh.time_translation, zero);
    b.commutes("pair.boost." + idx(j), bracket("G*tot_" + idx(j), "L*"), kvh.boosts[J], kvh.time_translation,
               imag_unit() * kvh.translations[J]);
    b.commutes("pair.rotation_kvn." + idx(j), bracket("Jtot_" + idx(j), "L"), kvn.rotations[J], kvn.time_translation,
               zero);
    b.commutes("pair.rotation_kvh." + idx(j), bracket("Jtot_" + idx(j), "L*"), kvh.rotations[J],
               kvh.time_translation, zero);
    b.commutes("pair.momentum." + idx(j), bracket("p1_" + idx(j) + "+p2_" + idx(j), "L*"), kvh.momenta[J],
               kvh.time_translation, zero);
  }
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      NCPoly charge = i == j ? NCPoly::scalar(alg, imag_unit() * total_mass) : zero;
      b.commutes("pair.central." + idx(i, j), bracket("G*tot_" + idx(i), "lqtot_" + idx(j)),
                 kvh.boosts[static_cast<std::size_t>(i - 1)], kvh.translations[static_cast<std::size_t>(j - 1)],
                 charge);
    }
  }

  // V(q1) alone is not translation invariant.
  CPoly external = alg->zero();
  for (int j = 1; j <= 3; ++j) external += alg->sym(alg->position_symbol(1, j)).pow(2);
  GeneratorOptions ext;
  ext.potential = GaussianRational::ratio(1, 2) * alg->sym("kappa") * external;
  const auto kvh_ext = galilei_generators(alg, Formalism::kvh, ext);
  b.commutes("pair.neg_external_translation.1", bracket("lqtot_1", "L*[V(q1)]"), kvh_ext.translations[0],
             kvh_ext.time_translation, zero, false);
  return b.out;
}

std::vector<Relation> hybrid_relations() {
  auto alg = make_algebra(Layout::pair(3, Sector::classical, Sector::quantum, {"kappa"}));
  const CPoly v = relative_harmonic(*alg, 1, 2);
  GeneratorOptions opts;
  opts.potential = v;
  const auto h = galilei_generators(alg, Formalism::hybrid, opts);
  const auto free = galilei_generators(alg, Formalism::hybrid);
  const NCPoly zero(alg);
  const CPoly total_mass = alg->sym("m1") + alg->sym("m2");
  const NCPoly potential_only = free.time_translation + multiplication_operator(alg, v);
  const NCPoly force_only = free.time_translation + kvn_map(alg, v);

  Builder b;
  for (int j = 1; j <= 3; ++j) {
    const auto J = static_cast<std::size_t>(j - 1);
    const std::string pk = "p_" + idx(j) + "+k_" + idx(j);
    b.commutes("hybrid.translation." + idx(j), bracket("lq_" + idx(j) + "+k_" + idx(j), "L_h"), h.translations[J],
               h.time_translation, zero);
    b.commutes("hybrid.momentum." + idx(j), bracket(pk, "L_h"), h.momenta[J], h.time_translation, zero);
    b.commutes("hybrid.momentum_balance." + idx(j), bracket(pk, "L_h"), h.momenta[J], h.time_translation,
               (-imag_unit()) * (alg->sym("kappa") * gen(alg, Sector::classical, GeneratorKind::lam_mom, 1, j)));
    b.commutes("hybrid.boost." + idx(j), bracket("G_h_" + idx(j), "L_h"), h.boosts[J], h.time_translation,
               imag_unit() * h.translations[J]);
    b.commutes("hybrid.rotation." + idx(j), bracket("Jtot_" + idx(j), "L_h"), h.rotations[J], h.time_translation,
               zero);
  }
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      NCPoly charge = i == j ? NCPoly::scalar(alg, imag_unit() * total_mass) : zero;
      b.commutes("hybrid.central." + idx(i, j), bracket("G_h_" + idx(i), "lq_" + idx(j) + "+k_" + idx(j)),
                 h.boosts[static_cast<std::size_t>(i - 1)], h.translations[static_cast<std::size_t>(j - 1)], charge);
    }
  }
  for (int j = 1; j <= 3; ++j) {
    const auto J = static_cast<std::size_t>(j - 1);
    const std::string pk = "p_" + idx(j) + "+k_" + idx(j);
    b.commutes("hybrid.neg_potential_only." + idx(j), bracket(pk, "L_h[V only]"), h.momenta[J], potential_only, zero,
               false);
    b.commutes("hybrid.neg_force_only." + idx(j), bracket(pk, "L_h[force only]"), h.momenta[J], force_only, zero,
               false);
  }
  return b.out;
}

std::vector<Relation> klein_relations() {
  Builder b;

  auto single = make_algebra(Layout::single_classical(3));
  auto single_q = make_algebra(Layout::single_quantum(3));
  const auto kvh1 = galilei_generators(single, Formalism::kvh);
  const auto quantum1 = galilei_generators(single_q, Formalism::quantum);
  b.equals("klein.free_liouvillian", "klein{1}(L*_free)", klein_quantize(kvh1.time_translation, {1}),
           quantum1.time_translation);
  for (int j = 1; j <= 3; ++j) {
    const auto J = static_cast<std::size_t>(j - 1);
    b.equals("klein.translation." + idx(j), "klein{1}(lq_" + idx(j) + ")", klein_quantize(kvh1.translations[J], {1}),
             quantum1.translations[J]);
    b.equals("klein.boost." + idx(j), "klein{1}(G*_" + idx(j) + ")", klein_quantize(kvh1.boosts[J], {1}),
             quantum1.boosts[J]);
  }

  auto pair_cc = make_algebra(Layout::pair(3, Sector::classical, Sector::classical, {"kappa"}));
  auto pair_cq = make_algebra(Layout::pair(3, Sector::classical, Sector::quantum, {"kappa"}));
  auto pair_qq = make_algebra(Layout::pair(3, Sector::quantum, Sector::quantum, {"kappa"}));
  GeneratorOptions cc;
  cc.potential = relative_harmonic(*pair_cc, 1, 2);
  GeneratorOptions cq;
  cq.potential = relative_harmonic(*pair_cq, 1, 2);
  GeneratorOptions qq;
  qq.potential = relative_harmonic(*pair_qq, 1, 2);
  const NCPoly two_body = galilei_generators(pair_cc, Formalism::kvh, cc).time_translation;
  const NCPoly hybrid = galilei_generators(pair_cq, Formalism::hybrid, cq).time_translation;
  const NCPoly schrodinger = galilei_generators(pair_qq, Formalism::quantum, qq).time_translation;

  b.equals("klein.hybrid_liouvillian", "klein{2}(L*_pair)", klein_quantize(two_body, {2}), hybrid);
  b.equals("klein.two_body_schrodinger", "klein{1,2}(L*_pair)", klein_quantize(two_body, {1, 2}), schrodinger);
  b.equals("klein.adjoint.free", "adjoint(klein{1}(L*_free))", adjoint(klein_quantize(kvh1.time_translation, {1})),
           klein_quantize(adjoint(kvh1.time_translation), {1}));
  b.equals("klein.adjoint.pair", "adjoint(klein{2}(L*_pair))", adjoint(klein_quantize(two_body, {2})),
           klein_quantize(adjoint(two_body), {2}));
  return b.out;
}

SuiteSelection parse_suite_selection(const std::string& name) {
  if (name == "kvn") return SuiteSelection::kvn;
  if (name == "kvh") return SuiteSelection::kvh;
  if (name == "hybrid") return SuiteSelection::hybrid;
  if (name == "all") return SuiteSelection::all;
  throw std::invalid_argument("unknown formalism selection '" + name + "' (kvn|kvh|hybrid|all)");
}

std::vector<Relation> galilei_suite(SuiteSelection selection) {
  std::vector<Relation> out;
  auto append = [&](std::vector<Relation> more) {
    for (auto& r : more) out.push_back(std::move(r));
  };
  if (selection == SuiteSelection::kvn || selection == SuiteSelection::all) append(kvn_galilei_relations());
  if (selection == SuiteSelection::kvh || selection == SuiteSelection::all) {
    append(kvh_galilei_relations());
    append(two_particle_relations());
  }
  if (selection == SuiteSelection::hybrid || selection == SuiteSelection::all) {
    append(hybrid_relations());
    append(klein_relations());
  }
  return out;
}

}  // namespace kvh

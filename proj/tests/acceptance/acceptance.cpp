// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance            all criteria
//   acceptance N [M ...]  the listed ones
// Exit status is 0 only if every selected criterion passes.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "kvh/commands.hpp"

using namespace kvh;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "kvh_acceptance";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string scenario_path(const std::string& name) { return std::string(KVH_SCENARIO_DIR) + "/" + name + ".cfg"; }

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << x;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
  CommandResult result;
  double seconds;
  fs::path dir;
};

Run run_scenario(const std::string& name, const std::string& tag = "") {
  const auto sc = load_scenario(scenario_path(name));
  const auto dir = work_dir() / (name + tag);
  fs::remove_all(dir);
  std::ostringstream sink;
  const auto t0 = std::chrono::steady_clock::now();
  auto r = execute(sc, dir.string(), sink);
  return {std::move(r), seconds_since(t0), dir};
}

bool all_checks(const CommandResult& r) {
  for (const auto& c : r.checks) {
    if (!c.pass) return false;
  }
  return !r.checks.empty();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Verdict suite(const std::vector<Relation>& relations, double limit) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = verify_algebra(relations);
  const double s = seconds_since(t0);
  std::string failed;
  for (const auto& r : report.results) {
    if (!r.ok()) failed += (failed.empty() ? "" : "; ") + r.label + " residual " + r.residual.str();
  }
  const bool ok = failed.empty() && s < limit;
  std::string detail = std::to_string(report.ok_count()) + "/" + std::to_string(report.results.size()) +
                       " relations as expected in " + num(s) + " s";
  if (!failed.empty()) detail += "; failing: " + failed;
  return {ok, detail};
}

// ---------------------------------------------------------------------------

Verdict criterion1() {
  auto rel = galilei_suite(SuiteSelection::kvn);
  auto kvh = galilei_suite(SuiteSelection::kvh);
  rel.insert(rel.end(), kvh.begin(), kvh.end());
  return suite(rel, 5.0);
}

Verdict criterion2() { return suite(galilei_suite(SuiteSelection::hybrid), 5.0); }

Verdict criterion3() { return suite(klein_relations(), 5.0); }

Verdict criterion4() {
  auto a = run_scenario("free_kvn");
  auto b = run_scenario("free_kvh");
  const bool ok = all_checks(a.result) && all_checks(b.result) && a.seconds < 10 && b.seconds < 10;
  return {ok, "256^2, t=0.5: KvN Linf " + num(a.result.metrics.at("closed_form_linf")) + ", KvH Linf " +
                  num(b.result.metrics.at("closed_form_linf")) + ", KvH phase " +
                  num(b.result.metrics.at("closed_form_phase")) + " rad; " + num(a.seconds + b.seconds) + " s"};
}

Verdict criterion5() {
  auto r = run_scenario("kvn_reality");
  return {all_checks(r.result), "10^4 harmonic steps, max|Im psi| = " + num(r.result.metrics.at("im_max"))};
}

Run& oracle_run() {
  static Run r = run_scenario("oracle_harmonic");
  return r;
}

Verdict criterion6() {
  auto& r = oracle_run();
  const double phase = r.result.metrics.at("phase_linf");
  return {phase <= 1e-3 && r.seconds < 60,
          "256^2, dt=1e-3, t=1: masked phase error " + num(phase) + " rad; " + num(r.seconds) + " s"};
}

Verdict criterion7() {
  const auto sc = load_scenario(scenario_path("covariance_kvh"));
  const auto w0 = gaussian_init(sc.grid, sc.initial);
  const double m = sc.transform->mass;
  const auto t0 = std::chrono::steady_clock::now();
  double worst_residual = 0.0;
  double worst_closed = 0.0;
  double worst_bch = 0.0;
  for (auto f : {Formalism::kvn, Formalism::kvh}) {
    for (double a : sc.transform->g1_values) {
      for (double v : sc.transform->g2_values) {
        const auto r = weyl_phase(GroupElement::translation(a, f, m), GroupElement::boost(v, 0.0, f, m), w0);
        // sigma = -1 with the boost applied first
        const auto closed = f == Formalism::kvn ? std::complex<double>(1.0) : std::polar(1.0, -m * a * v);
        worst_residual = std::max(worst_residual, r.residual);
        worst_closed = std::max(worst_closed, std::abs(std::remainder(std::arg(r.phase / closed), 2 * M_PI)));
        worst_bch = std::max(worst_bch, r.phase_error());
      }
    }
  }
  const double s = seconds_since(t0);
  return {worst_residual <= 1e-6 && worst_closed <= 1e-6 && worst_bch <= 1e-6 && s < 30,
          "3x3 (a,v) sweep, KvN and KvH: residual " + num(worst_residual) + ", phase vs exp(-i m a v) " +
              num(worst_closed) + ", vs BCH " + num(worst_bch) + "; " + num(s) + " s"};
}

Verdict criterion8() {
  auto a = run_scenario("hybrid_harmonic");
  auto b = run_scenario("hybrid_negative");
  return {all_checks(a.result) && all_checks(b.result) && a.seconds + b.seconds < 120,
          "64^3: <p+k> drift " + num(a.result.metrics.at("total_momentum_drift")) + ", <p> change " +
              num(a.result.metrics.at("classical_momentum_change")) + ", negative control drift " +
              num(b.result.metrics.at("total_momentum_drift")) + "; " + num(a.seconds + b.seconds) +
              " s (initial state with <p> = <lambda_q>, <lambda_p> = 0; other states drift, see criterion 2)"};
}

Verdict criterion9() {
  auto r = run_scenario("pair_harmonic");
  const auto sc = load_scenario(scenario_path("pair_harmonic"));
  const auto w0 = gaussian_init(sc.grid, sc.initial);
  const auto w1 = read_dump_file((r.dir / "final.kvhw").string());
  auto p1 = [&](const Wavefunction& w) {
    return density_moment(w, [&](std::size_t c) { return w.grid().coordinate(c, 1); });
  };
  const double single = std::abs(p1(w1) - p1(w0));
  return {all_checks(r.result) && r.seconds < 120 && single >= 1e-2,
          "32^4: <p1+p2> drift " + num(r.result.metrics.at("total_momentum_drift")) + ", <p1> change " + num(single) +
              "; " + num(r.seconds) + " s"};
}

Verdict criterion10() {
  auto& r = oracle_run();
  const double unitarity = r.result.metrics.at("norm_drift");

  // Strang order against the characteristics reference
  const auto sc = load_scenario(scenario_path("oracle_harmonic"));
  const auto w0 = gaussian_init(sc.grid, sc.initial);
  const auto ref = reference_solution(
      sc.grid,
      [&](double q, double p) {
        const double c[2] = {q, p};
        return gaussian_value(sc.grid, sc.initial, c);
      },
      flow_hamiltonian(sc.hamiltonian), sc.t_final, sc.formalism, 4000);
  double err[2];
  int k = 0;
  for (double dt : {0.02, 0.01}) {
    Propagator prop(build_plan(sc.formalism, sc.hamiltonian, dt), sc.grid);
    err[k++] = compare(ref.psi, run(w0, prop, sc.t_final, 0).final_state, sc.oracle->mask, &ref.valid).l2;
  }
  const double factor = err[0] / err[1];

  // byte-identical CSV across thread counts
  bool identical = true;
  for (const char* name : {"harmonic_kvn", "hybrid_harmonic"}) {
    std::string bytes[2];
    int j = 0;
    for (unsigned t : {1u, 3u}) {
      set_thread_count(t);
      auto run = run_scenario(name, "_threads" + std::to_string(t));
      bytes[j++] = slurp(run.dir / "run.csv") + slurp(run.dir / "checks.csv");
    }
    identical = identical && bytes[0] == bytes[1];
  }
  set_thread_count(1);

  return {unitarity <= 1e-10 && factor >= 3.2 && factor <= 4.8 && identical,
          "norm drift " + num(unitarity) + ", dt-halving error factor " + num(factor) + ", CSV across 1/3 threads " +
              (identical ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                          criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty()) {
    for (int i = 1; i <= 10; ++i) selected.push_back(i);
  }
  bool all = true;
  for (int n : selected) {
    if (n < 1 || n > 10) {
      std::cerr << "no criterion " << n << '\n';
      return 2;
    }
    Verdict v{false, ""};
    try {
      v = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::cout << "criterion " << std::setw(2) << n << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail
              << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}

#include "kvh/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#ifndef KVH_VERSION
#define KVH_VERSION "unknown"
#endif

namespace kvh {

std::string_view version() { return KVH_VERSION; }

int cmd_check_algebra(SuiteSelection selection, const std::string& csv_path, std::ostream& out) {
  const auto report = verify_algebra(galilei_suite(selection));
  out << report.text();
  if (!csv_path.empty()) {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + csv_path);
    f << report.csv();
  }
  return report.ok_count() == report.results.size() ? exit_code::ok : exit_code::verification_failed;
}

namespace {

namespace fs = std::filesystem;

std::string short_number(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

void write_manifest(const Scenario& sc, const fs::path& dir) {
  auto f = open_output(dir / "manifest.cfg");
  f << "; kvh " << version() << "\n; kvh " << to_string(sc.command) << " manifest.cfg reruns this scenario\n\n"
    << sc.canonical();
}

void evaluate_checks(const Scenario& sc, CommandResult& r, const fs::path& dir, std::ostream& out) {
  for (const auto& c : sc.checks) {
    auto it = r.metrics.find(c.metric);
    if (it == r.metrics.end()) {
      throw ConfigError(sc.source, c.line, c.column, "metric '" + c.metric + "' is not available for this scenario");
    }
    const double v = it->second;
    const bool pass = c.upper ? v <= c.bound : v >= c.bound;
    r.checks.push_back({c, v, pass});
  }
  auto f = open_output(dir / "checks.csv");
  f << "check,value,bound,status\n";
  std::size_t passed = 0;
  for (const auto& c : r.checks) {
    const std::string bound = (c.spec.upper ? "<= " : ">= ") + format_double(c.spec.bound);
    f << c.spec.metric << ',' << format_double(c.value) << ',' << bound << ',' << (c.pass ? "PASS" : "FAIL") << '\n';
    out << (c.pass ? "PASS" : "FAIL") << "  " << c.spec.metric << " = " << short_number(c.value) << "  (" << bound
        << ")\n";
    passed += c.pass;
  }
  out << (passed == r.checks.size() ? "PASS " : "FAIL ") << passed << '/' << r.checks.size() << " checks\n";
  if (passed != r.checks.size()) r.exit_code = exit_code::verification_failed;
}

template <class F>
void write_file(const fs::path& p, F&& body) {
  auto f = open_output(p);
  body(f);
}

// ---------------------------------------------------------------------------
// evolve

double density_l1(const Wavefunction& a, const Wavefunction& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(std::norm(a[i]) - std::norm(b[i]));
  return s * a.grid().cell_weight();
}

// Free streaming of the initial packet, with the KvH phase exp(+i p^2 t/2m).
Wavefunction free_closed_form(const Scenario& sc, double t) {
  const auto& g = sc.grid;
  const auto pairs = classical_pairs(g);
  Wavefunction w(g);
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> c(g.rank());
    for (std::size_t i = b; i < e; ++i) {
      double phase = 0.0;
      for (std::size_t a = 0; a < g.rank(); ++a) c[a] = g.coordinate(i, a);
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [qa, pa] = pairs[k];
        const double m = sc.hamiltonian.masses[k];
        const double p = c[pa];
        c[qa] -= p * t / m;
        phase += p * p * t / (2 * m);
      }
      w[i] = gaussian_value(g, sc.initial, c);
      if (sc.formalism == Formalism::kvh) w[i] *= std::polar(1.0, phase);
    }
  });
  return w;
}

CommandResult run_evolve(const Scenario& sc, const fs::path& dir, std::ostream& out) {
  CommandResult r;
  Propagator prop(build_plan(sc.formalism, sc.hamiltonian, sc.dt, sc.drop_force), sc.grid);
  r.warnings = prop.warnings();
  const auto w0 = gaussian_init(sc.grid, sc.initial);
  auto result = run(w0, prop, sc.t_final, sc.sample_every, [&](std::size_t index, const Wavefunction& w) {
    if (sc.output.dump_every != 0 && index % sc.output.dump_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "state_%05zu.kvhw", index);
      write_dump_file((dir / name).string(), w);
    }
  });
  write_file(dir / "run.csv", [&](std::ostream& f) { result.record.write_csv(f); });
  if (sc.output.final_dump) write_dump_file((dir / "final.kvhw").string(), result.final_state);

  const auto& samples = result.record.samples;
  const auto& first = samples.front();
  double norm_drift = 0.0, im_max = 0.0, leak = 0.0, energy = 0.0, total = 0.0, classical = 0.0;
  for (const auto& s : samples) {
    norm_drift = std::max(norm_drift, std::abs(s.norm - 1.0));
    im_max = std::max(im_max, s.im_max);
    leak = std::max(leak, s.leakage);
    energy = std::max(energy, std::abs(s.energy - first.energy));
    total = std::max(total, std::abs(s.p_mean + s.k_mean - first.p_mean - first.k_mean));
    classical = std::max(classical, std::abs(s.p_mean - first.p_mean));
  }
  r.metrics = {{"norm_drift", norm_drift},
               {"im_max", im_max},
               {"leakage", leak},
               {"energy_drift", energy},
               {"total_momentum_drift", total},
               {"classical_momentum_change", classical},
               {"period_return", density_l1(result.final_state, w0)}};
  if (sc.hamiltonian.potential == PotentialKind::free && sc.formalism != Formalism::hybrid) {
    auto m = compare(free_closed_form(sc, sc.t_final), result.final_state);
    r.metrics["closed_form_linf"] = m.linf;
    r.metrics["closed_form_phase"] = m.phase_linf;
  }
  out << sc.name << ": " << to_string(sc.formalism) << ' ' << to_string(sc.hamiltonian.potential) << ", "
      << step_count(sc.t_final, sc.dt) << " steps on " << sc.grid.size() << " cells\n";
  return r;
}

// ---------------------------------------------------------------------------
// covariance

GroupElement element(GroupKind k, double value, Formalism f, double m) {
  switch (k) {
    case GroupKind::translation: return GroupElement::translation(value, f, m);
    case GroupKind::momentum_translation: return GroupElement::momentum_translation(value, f, m);
    case GroupKind::boost: return GroupElement::boost(value, 0.0, f, m);
    case GroupKind::free_time: return GroupElement::free_time(value, f, m);
    case GroupKind::rotation: break;
  }
  throw std::invalid_argument("rotations have no grid action");
}

const char* parameter_name(GroupKind k) {
  switch (k) {
    case GroupKind::translation: return "a";
    case GroupKind::momentum_translation: return "b";
    case GroupKind::boost: return "v";
    case GroupKind::free_time: return "t";
    case GroupKind::rotation: return "theta";
  }
  return "?";
}

CommandResult run_covariance(const Scenario& sc, const fs::path& dir, std::ostream& out) {
  CommandResult r;
  const auto& t = *sc.transform;
  const auto w0 = gaussian_init(sc.grid, sc.initial);
  std::vector<ActionRow> rows;
  double weyl_residual = 0.0, weyl_error = 0.0, cov_residual = 0.0, cov_error = 0.0;
  bool any_prediction = false;
  for (auto f : t.formalisms) {
    for (double a : t.g1_values) {
      for (double b : t.g2_values) {
        const auto g1 = element(t.g1, a, f, t.mass);
        const auto g2 = element(t.g2, b, f, t.mass);
        const auto w = weyl_phase(g1, g2, w0);
        std::ostringstream params;
        params << parameter_name(t.g1) << '=' << format_double(a) << ' ' << parameter_name(t.g2) << '='
               << format_double(b) << " m=" << format_double(t.mass);
        const double predicted =
            w.predicted ? std::arg(*w.predicted) : std::numeric_limits<double>::quiet_NaN();
        rows.push_back({to_string(f), to_string(t.g1), to_string(t.g2), params.str(), w.phase, predicted, w.residual});
        if (w.predicted) {
          any_prediction = true;
          weyl_residual = std::max(weyl_residual, w.residual);
          weyl_error = std::max(weyl_error, w.phase_error());
        }
        out << to_string(f) << "  " << g1.str() << ' ' << g2.str() << "  phase=" << short_number(std::arg(w.phase))
            << "  predicted=" << (w.predicted ? short_number(predicted) : "none")
            << "  residual=" << short_number(w.residual) << '\n';
      }
    }
    for (double v : t.covariance_v) {
      const auto c = covariance_check(f, t.mass, v, t.covariance_t, w0);
      std::ostringstream params;
      params << "v=" << format_double(v) << " t=" << format_double(t.covariance_t) << " m=" << format_double(t.mass);
      rows.push_back({to_string(f), "boost_then_evolve", "evolve_then_boost", params.str(), c.phase, 0.0, c.residual});
      cov_residual = std::max(cov_residual, c.residual);
      cov_error = std::max(cov_error, std::abs(std::arg(c.phase)));
      out << to_string(f) << "  covariance(" << params.str() << ")  residual=" << short_number(c.residual) << '\n';
    }
  }
  write_file(dir / "action.csv", [&](std::ostream& f) { write_action_csv(f, rows); });
  if (any_prediction) {
    r.metrics["weyl_residual"] = weyl_residual;
    r.metrics["weyl_phase_error"] = weyl_error;
  }
  if (!t.covariance_v.empty()) {
    r.metrics["covariance_residual"] = cov_residual;
    r.metrics["covariance_phase_error"] = cov_error;
  }
  return r;
}

// ---------------------------------------------------------------------------
// oracle

CommandResult run_oracle(const Scenario& sc, const fs::path& dir, std::ostream& out) {
  CommandResult r;
  const auto& o = *sc.oracle;
  const auto h = flow_hamiltonian(sc.hamiltonian);
  Propagator prop(build_plan(sc.formalism, sc.hamiltonian, sc.dt, sc.drop_force), sc.grid);
  r.warnings = prop.warnings();
  const auto w0 = gaussian_init(sc.grid, sc.initial);
  const std::size_t n = step_count(sc.t_final, sc.dt);

  struct Row {
    double t;
    CompareMetrics m;
    std::size_t flagged;
  };
  std::vector<Row> rows;
  auto reference = [&](double t) {
    const std::size_t steps =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(o.rk4_steps) * t / sc.t_final)));
    if (o.analytic_initial) {
      return reference_solution(
          sc.grid,
          [&](double q, double p) {
            const double c[2] = {q, p};
            return gaussian_value(sc.grid, sc.initial, c);
          },
          h, t, sc.formalism, steps);
    }
    return reference_solution(w0, h, t, sc.formalism, steps, o.interpolation);
  };
  auto result = run(w0, prop, sc.t_final, sc.sample_every, [&](std::size_t index, const Wavefunction& w) {
    const std::size_t done = sc.sample_every == 0 ? index * n : std::min(index * sc.sample_every, n);
    const double t = static_cast<double>(done) * sc.dt;
    const auto ref = reference(t);
    rows.push_back({t, compare(ref.psi, w, o.mask, &ref.valid), ref.flagged});
  });
  write_file(dir / "run.csv", [&](std::ostream& f) { result.record.write_csv(f); });
  write_file(dir / "oracle.csv", [&](std::ostream& f) {
    f << "t,l2,l2_aligned,linf,modulus_linf,phase_linf,phase_linf_aligned,global_phase,masked_cells,flagged_cells\n";
    for (const auto& row : rows) {
      const auto& m = row.m;
      f << format_double(row.t) << ',' << format_double(m.l2) << ',' << format_double(m.l2_aligned) << ','
        << format_double(m.linf) << ',' << format_double(m.modulus_linf) << ',' << format_double(m.phase_linf) << ','
        << format_double(m.phase_linf_aligned) << ',' << format_double(m.global_phase) << ',' << m.masked_cells << ','
        << row.flagged << '\n';
    }
  });

  std::size_t every = 0;
  if (sc.sample_every != 0 && n != 0 && (o.rk4_steps * sc.sample_every) % n == 0) {
    every = o.rk4_steps * sc.sample_every / n;
  }
  const auto bundle = integrate_flow(h, o.seeds, sc.t_final, o.rk4_steps, every);
  write_file(dir / "trajectories.csv", [&](std::ostream& f) { bundle.write_csv(f, h); });
  if (sc.output.final_dump) write_dump_file((dir / "final.kvhw").string(), result.final_state);

  double norm_drift = 0.0;
  for (const auto& s : result.record.samples) norm_drift = std::max(norm_drift, std::abs(s.norm - 1.0));
  const auto& last = rows.back();
  r.metrics = {{"norm_drift", norm_drift},
               {"l2", last.m.l2},
               {"linf", last.m.linf},
               {"modulus_linf", last.m.modulus_linf},
               {"phase_linf", last.m.phase_linf},
               {"phase_linf_aligned", last.m.phase_linf_aligned},
               {"flagged_fraction", static_cast<double>(last.flagged) / static_cast<double>(sc.grid.size())},
               {"trajectory_energy_drift", bundle.max_energy_drift}};
  out << sc.name << ": oracle " << to_string(sc.formalism) << ' ' << to_string(sc.hamiltonian.potential) << " at t="
      << format_double(sc.t_final) << ", " << last.m.masked_cells << " masked cells, " << last.flagged
      << " flagged\n";
  return r;
}

}  // namespace

CommandResult execute(const Scenario& sc, const std::string& out_dir, std::ostream& out) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError(sc.source, 0, 0, "cannot create output directory " + out_dir);
  try {
    write_manifest(sc, dir);
  } catch (const std::runtime_error& e) {
    throw ConfigError(sc.source, 0, 0, e.what());
  }
  CommandResult r;
  switch (sc.command) {
    case Command::evolve: r = run_evolve(sc, dir, out); break;
    case Command::covariance: r = run_covariance(sc, dir, out); break;
    case Command::oracle: r = run_oracle(sc, dir, out); break;
  }
  evaluate_checks(sc, r, dir, out);
  return r;
}

int run_scenario_file(Command expected, const std::string& cfg_path, const std::string& out_dir, std::ostream& out,
                      std::ostream& err) {
  try {
    const auto sc = load_scenario(cfg_path);
    if (sc.command != expected) {
      throw ConfigError(cfg_path, 0, 0,
                        "scenario is a '" + to_string(sc.command) + "' scenario, not '" + to_string(expected) + "'");
    }
    const auto r = execute(sc, out_dir, out);
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    return r.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const NumericalAbort& e) {
    err << "numerical abort at step " << e.step() << ": " << e.what() << '\n';
    return exit_code::numerical_abort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::config_error;
  }
}

}  // namespace kvh

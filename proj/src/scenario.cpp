#include "kvh/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace kvh {

ConfigError::ConfigError(const std::string& source, int line, int column, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

std::string to_string(Command c) {
  switch (c) {
    case Command::evolve: return "evolve";
    case Command::covariance: return "covariance";
    case Command::oracle: return "oracle";
  }
  return "?";
}

std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

// ---------------------------------------------------------------------------
// INI

namespace {

bool identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

bool space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// [b, e) with surrounding blanks removed; b moves forward.
void trim(const std::string& s, std::size_t& b, std::size_t& e) {
  while (b < e && space(s[b])) ++b;
  while (e > b && space(s[e - 1])) --e;
}

}  // namespace

std::vector<IniSection> parse_ini(std::istream& is, const std::string& source) {
  std::vector<IniSection> sections;
  std::string line;
  int number = 0;
  auto fail = [&](std::size_t col, const std::string& msg) {
    throw ConfigError(source, number, static_cast<int>(col) + 1, msg);
  };
  while (std::getline(is, line)) {
    ++number;
    std::size_t end = line.size();
    for (std::size_t i = 0; i < line.size(); ++i) {
      if ((line[i] == ';' || line[i] == '#') && (i == 0 || space(line[i - 1]))) {
        end = i;
        break;
      }
    }
    std::size_t b = 0;
    trim(line, b, end);
    if (b == end) continue;

    if (line[b] == '[') {
      if (line[end - 1] != ']') fail(end - 1, "section header must end with ']'");
      std::size_t nb = b + 1;
      std::size_t ne = end - 1;
      trim(line, nb, ne);
      const auto split = line.find_first_of(" \t", nb);
      IniSection sec;
      sec.line = number;
      if (split != std::string::npos && split < ne) {
        sec.name = line.substr(nb, split - nb);
        std::size_t ab = split;
        std::size_t ae = ne;
        trim(line, ab, ae);
        sec.argument = line.substr(ab, ae - ab);
        if (!identifier(sec.argument)) fail(ab, "bad section argument '" + sec.argument + "'");
      } else {
        sec.name = line.substr(nb, ne - nb);
      }
      if (!identifier(sec.name)) fail(nb, "bad section name '" + sec.name + "'");
      for (const auto& other : sections) {
        if (other.name == sec.name && other.argument == sec.argument) {
          fail(b, "duplicate section [" + sec.name + (sec.argument.empty() ? "" : " " + sec.argument) +
                      "] (first at line " + std::to_string(other.line) + ")");
        }
      }
      sections.push_back(std::move(sec));
      continue;
    }

    const auto eq = line.find('=', b);
    if (eq == std::string::npos || eq >= end) fail(b, "expected 'key = value' or a [section] header");
    if (sections.empty()) fail(b, "entry outside of any section");
    std::size_t kb = b;
    std::size_t ke = eq;
    trim(line, kb, ke);
    std::size_t vb = eq + 1;
    std::size_t ve = end;
    trim(line, vb, ve);
    const std::string key = line.substr(kb, ke - kb);
    if (!identifier(key)) fail(kb, "bad key '" + key + "'");
    if (vb == ve) fail(eq, "missing value for '" + key + "'");
    auto& sec = sections.back();
    for (const auto& e : sec.entries) {
      if (e.key == key) fail(kb, "duplicate key '" + key + "' (first at line " + std::to_string(e.line) + ")");
    }
    sec.entries.push_back({key, line.substr(vb, ve - vb), number, static_cast<int>(kb) + 1, static_cast<int>(vb) + 1});
  }
  return sections;
}

// ---------------------------------------------------------------------------
// typed access

namespace {

class SectionReader {
 public:
  SectionReader(const IniSection& sec, const std::string& source, std::set<std::string> allowed)
      : sec_(sec), source_(source) {
    for (const auto& e : sec.entries) {
      if (!allowed.count(e.key)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        throw ConfigError(source, e.line, e.column,
                          "unknown key '" + e.key + "' in [" + sec.name + "] (allowed: " + list + ")");
      }
    }
  }

  const IniEntry* find(std::string_view key) const {
    for (const auto& e : sec_.entries) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }
  bool has(std::string_view key) const { return find(key) != nullptr; }

  const IniEntry& need(std::string_view key) const {
    if (auto e = find(key)) return *e;
    throw ConfigError(source_, sec_.line, 1, "[" + sec_.name + "] is missing '" + std::string(key) + "'");
  }

  [[noreturn]] void fail(const IniEntry& e, const std::string& msg, int offset = 0) const {
    throw ConfigError(source_, e.line, e.value_column + offset, msg);
  }
  [[noreturn]] void fail_section(const std::string& msg) const { throw ConfigError(source_, sec_.line, 1, msg); }

  double number(const IniEntry& e, std::string_view text, int offset) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail(e, "'" + std::string(text) + "' is not a number", offset);
    if (!std::isfinite(v)) fail(e, "'" + e.key + "' must be finite", offset);
    return v;
  }

  double real(std::string_view key) const {
    const auto& e = need(key);
    return number(e, e.value, 0);
  }
  double real(std::string_view key, double fallback) const { return has(key) ? real(key) : fallback; }

  double positive(std::string_view key) const {
    const double v = real(key);
    if (!(v > 0.0)) fail(need(key), "'" + std::string(key) + "' must be positive");
    return v;
  }

  std::size_t count(std::string_view key) const {
    const auto& e = need(key);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || ptr != e.value.data() + e.value.size()) {
      fail(e, "'" + e.value + "' is not a non-negative integer");
    }
    return v;
  }
  std::size_t count(std::string_view key, std::size_t fallback) const { return has(key) ? count(key) : fallback; }

  bool flag(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& e = need(key);
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    fail(e, "expected true or false, got '" + e.value + "'");
  }

  // Comma-separated items with their column offsets.
  std::vector<std::pair<std::string, int>> items(const IniEntry& e) const {
    std::vector<std::pair<std::string, int>> out;
    std::size_t start = 0;
    const auto& s = e.value;
    while (true) {
      const auto comma = s.find(',', start);
      std::size_t b = start;
      std::size_t end = comma == std::string::npos ? s.size() : comma;
      trim(s, b, end);
      if (b == end) fail(e, "empty list item", static_cast<int>(start));
      out.emplace_back(s.substr(b, end - b), static_cast<int>(b));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }

  std::vector<double> reals(std::string_view key) const {
    const auto& e = need(key);
    std::vector<double> out;
    for (const auto& [text, off] : items(e)) out.push_back(number(e, text, off));
    return out;
  }

  template <class Parse>
  auto choice(std::string_view key, Parse parse) const {
    const auto& e = need(key);
    try {
      return parse(e.value);
    } catch (const std::invalid_argument& ex) {
      fail(e, ex.what());
    }
  }

  std::string text(std::string_view key) const { return need(key).value; }

  const IniSection& section() const { return sec_; }

 private:
  const IniSection& sec_;
  const std::string& source_;
};

const std::set<std::string> metric_names(Command c) {
  switch (c) {
    case Command::evolve:
      return {"norm_drift", "im_max", "leakage", "energy_drift", "total_momentum_drift", "classical_momentum_change",
              "period_return", "closed_form_linf", "closed_form_phase"};
    case Command::covariance:
      return {"weyl_residual", "weyl_phase_error", "covariance_residual", "covariance_phase_error"};
    case Command::oracle:
      return {"norm_drift", "l2",         "linf",          "modulus_linf", "phase_linf", "phase_linf_aligned",
              "flagged_fraction", "trajectory_energy_drift"};
  }
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------
// scenario

Scenario parse_scenario(std::istream& is, const std::string& source) {
  const auto sections = parse_ini(is, source);
  Scenario sc;
  sc.source = source;

  const IniSection* scenario = nullptr;
  const IniSection* dynamics = nullptr;
  const IniSection* initial = nullptr;
  const IniSection* transform = nullptr;
  const IniSection* oracle = nullptr;
  const IniSection* checks = nullptr;
  const IniSection* output = nullptr;
  std::vector<const IniSection*> axes;
  for (const auto& sec : sections) {
    if (sec.name == "axis") {
      if (sec.argument.empty()) throw ConfigError(source, sec.line, 1, "[axis] needs a name, e.g. [axis q]");
      axes.push_back(&sec);
      continue;
    }
    if (!sec.argument.empty()) {
      throw ConfigError(source, sec.line, 1, "[" + sec.name + "] takes no argument");
    }
    const IniSection** slot = sec.name == "scenario"    ? &scenario
                              : sec.name == "dynamics"  ? &dynamics
                              : sec.name == "initial"   ? &initial
                              : sec.name == "transform" ? &transform
                              : sec.name == "oracle"    ? &oracle
                              : sec.name == "checks"    ? &checks
                              : sec.name == "output"    ? &output
                                                        : nullptr;
    if (slot == nullptr) {
      throw ConfigError(source, sec.line, 2,
                        "unknown section [" + sec.name +
                            "] (allowed: scenario, axis, dynamics, initial, transform, oracle, checks, output)");
    }
    *slot = &sec;
  }
  if (scenario == nullptr) throw ConfigError(source, 1, 1, "missing [scenario] section");

  SectionReader top(*scenario, source, {"name", "command"});
  sc.name = top.text("name");
  sc.command = top.choice("command", [](std::string_view s) {
    for (auto c : {Command::evolve, Command::covariance, Command::oracle}) {
      if (s == to_string(c)) return c;
    }
    throw std::invalid_argument("unknown command '" + std::string(s) + "' (expected evolve, covariance or oracle)");
  });
  auto needs = [&](const IniSection* sec, const char* name, bool wanted) {
    if (wanted && sec == nullptr) {
      throw ConfigError(source, scenario->line, 1, to_string(sc.command) + " needs a [" + name + "] section");
    }
    if (!wanted && sec != nullptr) {
      throw ConfigError(source, sec->line, 1, "[" + std::string(name) + "] does not apply to " + to_string(sc.command));
    }
  };
  needs(dynamics, "dynamics", sc.command != Command::covariance);
  needs(initial, "initial", true);
  needs(transform, "transform", sc.command == Command::covariance);
  if (sc.command != Command::oracle) needs(oracle, "oracle", false);

  // grid
  if (axes.empty()) throw ConfigError(source, scenario->line, 1, "no [axis NAME] sections");
  std::vector<Axis> axis_list;
  for (const auto* sec : axes) {
    SectionReader r(*sec, source, {"role", "min", "extent", "points"});
    Axis a;
    a.name = sec->argument;
    a.role = r.choice("role", [](std::string_view s) { return parse_role(s); });
    a.min = r.real("min");
    a.extent = r.real("extent");
    a.points = r.count("points");
    axis_list.push_back(a);
  }
  try {
    sc.grid = GridSpec(axis_list);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source, axes.front()->line, 1, e.what());
  }

  // dynamics
  if (dynamics != nullptr) {
    SectionReader r(*dynamics, source,
                    {"formalism", "masses", "potential", "kappa", "coefficients", "dt", "t_final", "sample_every",
                     "drop_force"});
    sc.formalism = r.choice("formalism", [](std::string_view s) { return parse_formalism(s); });
    sc.hamiltonian.masses = r.reals("masses");
    sc.hamiltonian.potential = r.choice("potential", [](std::string_view s) { return parse_potential_kind(s); });
    sc.hamiltonian.kappa = r.real("kappa", 1.0);
    if (r.has("coefficients")) {
      if (sc.hamiltonian.potential != PotentialKind::polynomial) {
        r.fail(r.need("coefficients"), "coefficients apply to the polynomial potential only");
      }
      sc.hamiltonian.coefficients = r.reals("coefficients");
    }
    sc.dt = r.positive("dt");
    sc.t_final = r.real("t_final");
    if (sc.t_final < 0.0) r.fail(r.need("t_final"), "t_final must not be negative");
    sc.sample_every = r.count("sample_every", 1);
    sc.drop_force = r.flag("drop_force", false);
    try {
      step_count(sc.t_final, sc.dt);
      auto plan = build_plan(sc.formalism, sc.hamiltonian, sc.dt, sc.drop_force);
      check_compatible(plan, sc.grid);
    } catch (const std::invalid_argument& e) {
      r.fail_section(e.what());
    }
    if (sc.command == Command::oracle) {
      if (sc.formalism != Formalism::kvn && sc.formalism != Formalism::kvh) {
        r.fail(r.need("formalism"), "the oracle handles kvn and kvh only");
      }
      if (sc.grid.rank() != 2 || sc.grid.axis(0).role != Role::q || sc.grid.axis(1).role != Role::p) {
        r.fail_section("the oracle needs a grid of exactly one q axis followed by one p axis");
      }
      try {
        flow_hamiltonian(sc.hamiltonian);
      } catch (const std::invalid_argument& e) {
        r.fail(r.need("potential"), e.what());
      }
    }
  }

  // initial state
  {
    SectionReader r(*initial, source, {"center", "width", "phase", "wavenumber"});
    sc.initial.center = r.reals("center");
    sc.initial.width = r.reals("width");
    sc.initial.phase = r.has("phase") ? r.choice("phase", [](std::string_view s) { return parse_phase_kind(s); })
                                      : PhaseKind::none;
    if (r.has("wavenumber")) sc.initial.wavenumber = r.reals("wavenumber");
    try {
      validate_gaussian(sc.grid, sc.initial);
    } catch (const std::invalid_argument& e) {
      r.fail_section(e.what());
    }
  }

  if (transform != nullptr) {
    SectionReader r(*transform, source,
                    {"g1", "g2", "g1_values", "g2_values", "formalisms", "mass", "covariance_v", "covariance_t"});
    TransformSpec t;
    auto kind = [](std::string_view s) {
      auto k = parse_group_kind(s);
      if (k == GroupKind::rotation) throw std::invalid_argument("rotations have no grid action");
      return k;
    };
    t.g1 = r.choice("g1", kind);
    t.g2 = r.choice("g2", kind);
    t.g1_values = r.reals("g1_values");
    t.g2_values = r.reals("g2_values");
    if (r.has("formalisms")) {
      const auto& e = r.need("formalisms");
      t.formalisms.clear();
      for (const auto& [text, off] : r.items(e)) {
        try {
          const auto f = parse_formalism(text);
          if (f != Formalism::kvn && f != Formalism::kvh) throw std::invalid_argument("formalisms must be kvn or kvh");
          t.formalisms.push_back(f);
        } catch (const std::invalid_argument& ex) {
          r.fail(e, ex.what(), off);
        }
      }
    }
    t.mass = r.has("mass") ? r.positive("mass") : 1.0;
    if (r.has("covariance_v")) {
      t.covariance_v = r.reals("covariance_v");
      t.covariance_t = r.real("covariance_t");
    } else if (r.has("covariance_t")) {
      r.fail(r.need("covariance_t"), "covariance_t needs covariance_v");
    }
    if (classical_pairs(sc.grid).empty()) r.fail_section("group actions need a (q, p) pair on the grid");
    sc.transform = t;
  }

  if (sc.command == Command::oracle) {
    OracleSpec o;
    if (oracle != nullptr) {
      SectionReader r(*oracle, source, {"rk4_steps", "interpolation", "initial", "mask", "seeds"});
      o.rk4_steps = r.count("rk4_steps", o.rk4_steps);
      if (o.rk4_steps == 0) r.fail(r.need("rk4_steps"), "rk4_steps must be positive");
      if (r.has("interpolation")) {
        o.interpolation = r.choice("interpolation", [](std::string_view s) { return parse_interpolation(s); });
      }
      if (r.has("initial")) {
        o.analytic_initial = r.choice("initial", [](std::string_view s) {
          if (s == "analytic") return true;
          if (s == "grid") return false;
          throw std::invalid_argument("expected analytic or grid");
        });
      }
      o.mask = r.has("mask") ? r.positive("mask") : o.mask;
      if (r.has("seeds")) {
        const auto& e = r.need("seeds");
        for (const auto& [text, off] : r.items(e)) {
          std::istringstream ss(text);
          std::string a;
          std::string b;
          std::string extra;
          ss >> a >> b;
          if (a.empty() || b.empty() || (ss >> extra)) r.fail(e, "a seed is 'q p'", off);
          o.seeds.emplace_back(r.number(e, a, off), r.number(e, b, off));
        }
      }
    }
    if (o.seeds.empty()) o.seeds.emplace_back(sc.initial.center[0], sc.initial.center[1]);
    sc.oracle = o;
  }

  if (checks != nullptr) {
    const auto names = metric_names(sc.command);
    SectionReader r(*checks, source, names);
    for (const auto& e : checks->entries) {
      CheckSpec c;
      c.metric = e.key;
      c.line = e.line;
      c.column = e.column;
      const auto& v = e.value;
      if (v.rfind("<=", 0) == 0) {
        c.upper = true;
      } else if (v.rfind(">=", 0) == 0) {
        c.upper = false;
      } else {
        r.fail(e, "a check reads '<= bound' or '>= bound'");
      }
      std::size_t b = 2;
      std::size_t end = v.size();
      trim(v, b, end);
      c.bound = r.number(e, std::string_view(v).substr(b, end - b), static_cast<int>(b));
      sc.checks.push_back(c);
    }
  }

  if (output != nullptr) {
    SectionReader r(*output, source, {"dump_every", "final_dump"});
    sc.output.dump_every = r.count("dump_every", 0);
    sc.output.final_dump = r.flag("final_dump", true);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, 0, "cannot open file");
  return parse_scenario(in, path);
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + format_double(x);
  return s;
}

}  // namespace

std::string Scenario::canonical() const {
  std::ostringstream os;
  os << "[scenario]\nname = " << name << "\ncommand = " << to_string(command) << "\n";
  for (const auto& a : grid.axes()) {
    os << "\n[axis " << a.name << "]\nrole = " << to_string(a.role) << "\nmin = " << format_double(a.min)
       << "\nextent = " << format_double(a.extent) << "\npoints = " << a.points << "\n";
  }
  if (command != Command::covariance) {
    os << "\n[dynamics]\nformalism = " << to_string(formalism) << "\nmasses = " << join(hamiltonian.masses)
       << "\npotential = " << to_string(hamiltonian.potential) << "\nkappa = " << format_double(hamiltonian.kappa)
       << "\n";
    if (!hamiltonian.coefficients.empty()) os << "coefficients = " << join(hamiltonian.coefficients) << "\n";
    os << "dt = " << format_double(dt) << "\nt_final = " << format_double(t_final) << "\nsample_every = " << sample_every
       << "\ndrop_force = " << (drop_force ? "true" : "false") << "\n";
  }
  os << "\n[initial]\ncenter = " << join(initial.center) << "\nwidth = " << join(initial.width)
     << "\nphase = " << to_string(initial.phase) << "\n";
  if (!initial.wavenumber.empty()) os << "wavenumber = " << join(initial.wavenumber) << "\n";
  if (transform) {
    const auto& t = *transform;
    os << "\n[transform]\ng1 = " << to_string(t.g1) << "\ng2 = " << to_string(t.g2) << "\ng1_values = " << join(t.g1_values)
       << "\ng2_values = " << join(t.g2_values) << "\nformalisms = ";
    for (std::size_t i = 0; i < t.formalisms.size(); ++i) os << (i ? ", " : "") << to_string(t.formalisms[i]);
    os << "\nmass = " << format_double(t.mass) << "\n";
    if (!t.covariance_v.empty()) {
      os << "covariance_v = " << join(t.covariance_v) << "\ncovariance_t = " << format_double(t.covariance_t) << "\n";
    }
  }
  if (oracle) {
    const auto& o = *oracle;
    os << "\n[oracle]\nrk4_steps = " << o.rk4_steps << "\ninterpolation = " << to_string(o.interpolation)
       << "\ninitial = " << (o.analytic_initial ? "analytic" : "grid") << "\nmask = " << format_double(o.mask)
       << "\nseeds = ";
    for (std::size_t i = 0; i < o.seeds.size(); ++i) {
      os << (i ? ", " : "") << format_double(o.seeds[i].first) << ' ' << format_double(o.seeds[i].second);
    }
    os << "\n";
  }
  if (!checks.empty()) {
    os << "\n[checks]\n";
    for (const auto& c : checks) os << c.metric << " = " << (c.upper ? "<= " : ">= ") << format_double(c.bound) << "\n";
  }
  os << "\n[output]\ndump_every = " << output.dump_every << "\nfinal_dump = " << (output.final_dump ? "true" : "false")
     << "\n";
  return os.str();
}

}  // namespace kvh

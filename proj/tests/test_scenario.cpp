#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "kvh/commands.hpp"
#include "kvh/scenario.hpp"

using namespace kvh;
namespace fs = std::filesystem;

namespace {

const char* small_evolve = R"([scenario]
name = small
command = evolve

[axis q]
role = q
min = -6
extent = 12
points = 32

[axis p]
role = p
min = -6
extent = 12
points = 32

[dynamics]
formalism = kvh
masses = 1
potential = harmonic
kappa = 1
dt = 0.05
t_final = 0.5
sample_every = 2

[initial]
center = 0.5, 0   ; off center
width = 1.2, 1.2

[checks]
norm_drift = <= 1e-10
energy_drift = <= 1e-2

[output]
dump_every = 2
)";

Scenario parse(const std::string& text) {
  std::istringstream is(text);
  return parse_scenario(is, "test.cfg");
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

// line:column of the ConfigError thrown while parsing `text`
std::pair<int, int> error_position(const std::string& text, std::string* message = nullptr) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    if (message) *message = e.message();
    return {e.line(), e.column()};
  }
  FAIL("no ConfigError");
  return {0, 0};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("kvh_test_scenario_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("ini syntax") {
  std::istringstream is("; comment\n[a]\nx = 1 # trailing\n[axis q]\ny=two words\n");
  auto s = parse_ini(is, "t");
  REQUIRE(s.size() == 2);
  CHECK(s[0].entries[0].value == "1");
  CHECK(s[1].name == "axis");
  CHECK(s[1].argument == "q");
  CHECK(s[1].entries[0].value == "two words");
  CHECK(s[1].entries[0].value_column == 3);

  auto fails = [](const std::string& text, int line, int column) {
    std::istringstream in(text);
    try {
      parse_ini(in, "t");
    } catch (const ConfigError& e) {
      CHECK(e.line() == line);
      CHECK(e.column() == column);
      return;
    }
    FAIL("accepted: " << text);
  };
  fails("x = 1\n", 1, 1);
  fails("[a]\n  oops\n", 2, 3);
  fails("[a]\nx = 1\nx = 2\n", 3, 1);
  fails("[a\n", 1, 2);
  fails("[a]\n[a]\n", 2, 1);
  fails("[a]\nx =\n", 2, 3);
}

TEST_CASE("scenario fields") {
  auto sc = parse(small_evolve);
  CHECK(sc.name == "small");
  CHECK(sc.command == Command::evolve);
  CHECK(sc.grid.rank() == 2);
  CHECK(sc.grid.axis(1).role == Role::p);
  CHECK(sc.formalism == Formalism::kvh);
  CHECK(sc.hamiltonian.potential == PotentialKind::harmonic);
  CHECK(sc.dt == 0.05);
  CHECK(sc.sample_every == 2);
  CHECK(sc.initial.center == std::vector<double>{0.5, 0.0});
  REQUIRE(sc.checks.size() == 2);
  CHECK(sc.checks[1].metric == "energy_drift");
  CHECK(sc.checks[1].bound == 1e-2);
  CHECK(sc.output.dump_every == 2);
}

TEST_CASE("canonical form reads back identically") {
  auto sc = parse(small_evolve);
  auto again = parse(sc.canonical());
  CHECK(again.canonical() == sc.canonical());
  CHECK(again.dt == sc.dt);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(0.0015339807878856412) == "0.0015339807878856412");
}

TEST_CASE("config errors point at the offending text") {
  std::string msg;
  CHECK(error_position(replace(small_evolve, "dt = 0.05", "dtt = 0.05"), &msg) == std::pair{22, 1});
  CHECK(msg.find("unknown key 'dtt'") != std::string::npos);
  CHECK(error_position(replace(small_evolve, "dt = 0.05", "dt = 0.05x")) == std::pair{22, 6});
  CHECK(error_position(replace(small_evolve, "width = 1.2, 1.2", "width = 1.2, abc")) == std::pair{28, 14});
  CHECK(error_position(replace(small_evolve, "formalism = kvh", "formalism = kvm"), &msg) == std::pair{18, 13});
  CHECK(msg.find("unknown formalism") != std::string::npos);
  CHECK(error_position(replace(small_evolve, "t_final = 0.5", "t_final = 0.52"), &msg).first == 17);
  CHECK(msg.find("not an integer multiple") != std::string::npos);
  CHECK(error_position(replace(small_evolve, "masses = 1", "masses = 1, 2"), &msg).first == 17);
  CHECK(error_position(replace(small_evolve, "points = 32", "points = 30"), &msg).first == 5);
  CHECK(error_position(replace(small_evolve, "width = 1.2, 1.2", "width = 0.5, 1.2"), &msg).first == 26);
  CHECK(msg.find("below 3 grid spacings") != std::string::npos);
  CHECK(error_position(replace(small_evolve, "norm_drift = <= 1e-10", "norm_drift = < 1e-10")).first == 31);
  CHECK(error_position(replace(small_evolve, "norm_drift = <= 1e-10", "weyl_residual = <= 1e-10")).first == 31);
  CHECK(error_position(replace(small_evolve, "[output]", "[outputs]")) == std::pair{34, 2});
  CHECK(error_position(replace(small_evolve, "kappa = 1", "kappa = inf")).first == 21);
  CHECK(error_position(replace(small_evolve, "potential = harmonic", "potential = pair_harmonic")).first == 17);
}

TEST_CASE("command specific sections") {
  std::string msg;
  error_position(replace(small_evolve, "command = evolve", "command = covariance"), &msg);
  CHECK(msg.find("[dynamics] does not apply to covariance") != std::string::npos);
  error_position(replace(small_evolve, "[output]", "[oracle]\nrk4_steps = 10\n[output]"), &msg);
  CHECK(msg.find("does not apply to evolve") != std::string::npos);

  auto oracle = parse(replace(replace(small_evolve, "command = evolve", "command = oracle"), "energy_drift", "phase_linf"));
  REQUIRE(oracle.oracle);
  CHECK(oracle.oracle->seeds == std::vector<std::pair<double, double>>{{0.5, 0.0}});
  CHECK(oracle.oracle->interpolation == Interpolation::cubic);
}

TEST_CASE("every bundled scenario parses") {
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(KVH_SCENARIO_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    INFO(entry.path());
    auto sc = load_scenario(entry.path().string());
    CHECK(!sc.checks.empty());
    CHECK(parse(sc.canonical()).canonical() == sc.canonical());
    ++n;
  }
  CHECK(n >= 8);
}

TEST_CASE("execute writes the artifacts") {
  auto dir = scratch("artifacts");
  std::ostringstream out;
  auto r = execute(parse(small_evolve), dir.string(), out);
  CHECK(r.exit_code == exit_code::ok);
  CHECK(r.checks.size() == 2);
  for (const char* f : {"manifest.cfg", "run.csv", "checks.csv", "final.kvhw", "state_00000.kvhw", "state_00002.kvhw",
                        "state_00004.kvhw"}) {
    CHECK_MESSAGE(fs::exists(dir / f), f);
  }
  CHECK_FALSE(fs::exists(dir / "state_00001.kvhw"));
  CHECK(slurp(dir / "checks.csv").rfind("check,value,bound,status\nnorm_drift,", 0) == 0);
  CHECK(out.str().find("PASS 2/2 checks") != std::string::npos);
  auto final_state = read_dump_file((dir / "final.kvhw").string());
  CHECK(final_state.grid() == parse(small_evolve).grid);

  // the manifest reruns to the same numbers
  auto rerun = scratch("rerun");
  std::ostringstream ignored;
  execute(load_scenario((dir / "manifest.cfg").string()), rerun.string(), ignored);
  CHECK(slurp(rerun / "run.csv") == slurp(dir / "run.csv"));
}

TEST_CASE("CSV output does not depend on the thread count") {
  std::string csv[2];
  int k = 0;
  for (unsigned t : {1u, 4u}) {
    set_thread_count(t);
    auto dir = scratch("threads" + std::to_string(t));
    std::ostringstream out;
    execute(parse(small_evolve), dir.string(), out);
    csv[k++] = slurp(dir / "run.csv") + slurp(dir / "checks.csv");
  }
  set_thread_count(1);
  CHECK(csv[0] == csv[1]);
}

TEST_CASE("exit codes") {
  auto dir = scratch("exit");
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  std::ostringstream out;
  std::ostringstream err;
  CHECK(run_scenario_file(Command::evolve, write("ok.cfg", small_evolve), (dir / "ok").string(), out, err) == 0);
  CHECK(run_scenario_file(Command::oracle, write("ok2.cfg", small_evolve), (dir / "ok").string(), out, err) ==
        exit_code::config_error);
  CHECK(err.str().find("not 'oracle'") != std::string::npos);

  auto strict = replace(small_evolve, "energy_drift = <= 1e-2", "energy_drift = <= 1e-30");
  CHECK(run_scenario_file(Command::evolve, write("strict.cfg", strict), (dir / "strict").string(), out, err) ==
        exit_code::verification_failed);

  err.str("");
  auto typo = replace(small_evolve, "sample_every = 2", "sampel_every = 2");
  CHECK(run_scenario_file(Command::evolve, write("typo.cfg", typo), (dir / "typo").string(), out, err) ==
        exit_code::config_error);
  CHECK(err.str().find("typo.cfg:24:1: unknown key 'sampel_every'") != std::string::npos);

  auto blowup = replace(small_evolve, "kappa = 1", "kappa = 1e308");
  err.str("");
  CHECK(run_scenario_file(Command::evolve, write("nan.cfg", blowup), (dir / "nan").string(), out, err) ==
        exit_code::numerical_abort);
  CHECK(err.str().find("numerical abort") != std::string::npos);

  CHECK(run_scenario_file(Command::evolve, (dir / "missing.cfg").string(), (dir / "m").string(), out, err) ==
        exit_code::config_error);
}

TEST_CASE("check-algebra exit status follows the suite") {
  std::ostringstream out;
  CHECK(cmd_check_algebra(SuiteSelection::kvn, "", out) == exit_code::ok);
  CHECK(out.str().find("PASS 63/63 relations") != std::string::npos);
  out.str("");
  // [p + k, L_h] = -i kappa lambda_p: the hybrid momentum relations fail
  CHECK(cmd_check_algebra(SuiteSelection::hybrid, "", out) == exit_code::verification_failed);
  CHECK(out.str().find("FAIL 38/41 relations") != std::string::npos);
}

#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kvh/characteristics_oracle.hpp"
#include "kvh/evolve.hpp"
#include "kvh/galilei_action.hpp"
#include "kvh/phasespace_grid.hpp"

namespace kvh {

/// Bad configuration. what() reads "source:line:column: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

// Raw INI: "[section]" or "[section argument]" headers, "key = value" lines,
// comments from ';' or '#' to the end of the line. Duplicate keys are errors.
struct IniEntry {
  std::string key;
  std::string value;
  int line = 0;
  int column = 0;        // of the key
  int value_column = 0;  // of the value
};

struct IniSection {
  std::string name;
  std::string argument;
  int line = 0;
  std::vector<IniEntry> entries;
};

std::vector<IniSection> parse_ini(std::istream& is, const std::string& source);

enum class Command { evolve, covariance, oracle };

std::string to_string(Command c);

/// A bound on a named metric: metric <= bound or metric >= bound.
struct CheckSpec {
  std::string metric;
  bool upper = true;
  double bound = 0.0;
  int line = 0;
  int column = 0;
};

struct TransformSpec {
  GroupKind g1 = GroupKind::translation;
  GroupKind g2 = GroupKind::boost;
  std::vector<double> g1_values;
  std::vector<double> g2_values;
  std::vector<Formalism> formalisms{Formalism::kvn, Formalism::kvh};
  double mass = 1.0;
  std::vector<double> covariance_v;
  double covariance_t = 0.0;
};

struct OracleSpec {
  std::size_t rk4_steps = 1000;
  Interpolation interpolation = Interpolation::cubic;
  bool analytic_initial = true;
  double mask = 1e-6;
  std::vector<std::pair<double, double>> seeds;  // defaults to the packet center
};

struct OutputSpec {
  std::size_t dump_every = 0;  // in samples; 0 disables intermediate dumps
  bool final_dump = true;
};

struct Scenario {
  std::string source;
  std::string name;
  Command command = Command::evolve;
  GridSpec grid;

  Formalism formalism = Formalism::kvn;
  Hamiltonian hamiltonian;
  double dt = 0.0;
  double t_final = 0.0;
  std::size_t sample_every = 1;
  bool drop_force = false;

  GaussianSpec initial;
  std::optional<TransformSpec> transform;
  std::optional<OracleSpec> oracle;
  std::vector<CheckSpec> checks;
  OutputSpec output;

  /// The resolved configuration as INI text; parsing it gives back the same
  /// scenario.
  std::string canonical() const;
};

Scenario parse_scenario(std::istream& is, const std::string& source = "<input>");
Scenario load_scenario(const std::string& path);

/// Shortest text that reads back as the same double.
std::string format_double(double x);

}  // namespace kvh

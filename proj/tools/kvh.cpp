// kvh: symbolic checks and phase-space runs from the command line.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "kvh/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Koopman-von Neumann / Koopman-van Hove toolkit"};
  app.set_version_flag("--version", std::string(kvh::version()));
  app.require_subcommand(1);

  unsigned threads = 1;
  std::string out_dir = "kvh_out";
  app.add_option("--threads", threads, "worker threads for grid kernels")->check(CLI::Range(1u, 1024u));
  auto* out_opt = app.add_option("--out", out_dir, "output directory");

  std::string formalism = "all";
  auto* algebra = app.add_subcommand("check-algebra", "verify the Galilei, two-particle, hybrid and Klein relations");
  algebra->add_option("--formalism", formalism, "relation set")->check(CLI::IsMember({"kvn", "kvh", "hybrid", "all"}));
  algebra->fallthrough();

  std::string cfg;
  struct Entry {
    const char* name;
    const char* help;
    kvh::Command command;
  };
  const Entry entries[] = {
      {"evolve", "split-step run of a scenario", kvh::Command::evolve},
      {"covariance", "Weyl phases and boost covariance", kvh::Command::covariance},
      {"oracle", "spectral run against the characteristics oracle", kvh::Command::oracle},
  };
  std::vector<std::pair<CLI::App*, kvh::Command>> runners;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("config", cfg, "scenario file")->required()->check(CLI::ExistingFile);
    sub->fallthrough();
    runners.emplace_back(sub, e.command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kvh::exit_code::config_error;
  }

  kvh::set_thread_count(threads);

  if (algebra->parsed()) {
    try {
      std::string csv;
      if (out_opt->count() > 0) {
        std::filesystem::create_directories(out_dir);
        csv = (std::filesystem::path(out_dir) / "algebra.csv").string();
      }
      return kvh::cmd_check_algebra(kvh::parse_suite_selection(formalism), csv, std::cout);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kvh::exit_code::config_error;
    }
  }
  for (auto [sub, command] : runners) {
    if (sub->parsed()) return kvh::run_scenario_file(command, cfg, out_dir, std::cout, std::cerr);
  }
  return kvh::exit_code::config_error;
}

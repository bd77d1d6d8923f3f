// detflow command-line front end.
//
//   detflow run <scenario.json> [--output <file.csv>] [--fail-threshold <x>]
//                               [--method rk4|rkf45] [--h <x>] [--tol <x>]
//   detflow check <suite> [--seed <k>]
//
// Exit codes: 0 success, 1 property failure, 2 integration failure,
// 3 threshold breach, 4 parse/validation error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "CLI11.hpp"
#include "detflow/check.hpp"
#include "detflow/errors.hpp"
#include "detflow/run.hpp"
#include "detflow/scenario_io.hpp"

namespace {

std::string one_line(std::string msg) {
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return msg;
}

void error_line(const char* kind, const std::string& msg) {
  std::cerr << "error kind=" << kind << " msg=\"" << one_line(msg) << "\"\n";
}

// temp file in the target directory + rename, so readers never observe a
// half-written CSV.
void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  const fs::path tmp = dir / (target.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw detflow::Error("cannot write output file: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"detflow: integrate dX/dt + A(t)X + XB(t) = F(t) and track det X "
               "through independent determinant channels"};
  // long-form help only: the run subcommand's --h step override needs the name
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  std::string scenario_path;
  std::string output_path;
  std::string method_flag;
  double fail_threshold = 0.0;
  double h_flag = 0.0;
  double tol_flag = 0.0;

  CLI::App* run_cmd =
      app.add_subcommand("run", "Integrate a scenario file and emit the CSV drift report");
  run_cmd->set_help_flag("--help", "Print this help message and exit");
  run_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  CLI::Option* out_opt =
      run_cmd->add_option("--output", output_path, "Write the CSV atomically to this file");
  CLI::Option* thr_opt = run_cmd->add_option(
      "--fail-threshold", fail_threshold,
      "Exit 3 when any channel's max relative drift exceeds this value");
  CLI::Option* method_opt =
      run_cmd->add_option("--method", method_flag, "Override the solver method")
          ->check(CLI::IsMember({"rk4", "rkf45"}));
  CLI::Option* h_opt = run_cmd->add_option("--h", h_flag, "Override the rk4 fixed step");
  CLI::Option* tol_opt =
      run_cmd->add_option("--tol", tol_flag, "Override the rkf45 error tolerance");

  std::string suite;
  std::uint64_t seed = 42;
  CLI::App* check_cmd = app.add_subcommand("check", "Run the built-in property suites");
  check_cmd->set_help_flag("--help", "Print this help message and exit");
  check_cmd->add_option("suite", suite, "linalg | identities | convergence | all")
      ->required()
      ->check(CLI::IsMember({"linalg", "identities", "convergence", "all"}));
  check_cmd->add_option("--seed", seed, "Seed for the randomized cases (default 42)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;  // help/version exit cleanly; bad usage is a parse error
  }

  if (run_cmd->parsed()) {
    detflow::Scenario s;
    try {
      s = detflow::parse_scenario(scenario_path);
      if (method_opt->count() > 0) {
        s.solver.method = method_flag == "rk4" ? detflow::SolveMethod::Rk4Fixed
                                               : detflow::SolveMethod::Rkf45Adaptive;
      }
      if (h_opt->count() > 0) s.solver.h = h_flag;
      if (tol_opt->count() > 0) s.solver.tol = tol_flag;
      detflow::validate(s);
    } catch (const detflow::ParseError& e) {
      error_line("ParseError", e.what());
      return 4;
    } catch (const detflow::ValidationError& e) {
      error_line("ValidationError", e.what());
      return 4;
    }

    detflow::RunOptions opt;
    if (thr_opt->count() > 0) opt.fail_threshold = fail_threshold;

    try {
      if (out_opt->count() == 0) {
        return detflow::run(s, std::cout, std::cerr, opt);
      }
      std::ostringstream buffer;
      const int code = detflow::run(s, buffer, std::cerr, opt);
      if (code != 2) write_atomic(output_path, buffer.str());
      return code;
    } catch (const detflow::Error& e) {
      error_line("IoError", e.what());
      return 2;
    }
  }

  // check subcommand
  try {
    const auto outcomes = detflow::run_check(suite, seed, std::cout);
    return detflow::check_exit_code(outcomes);
  } catch (const detflow::Error& e) {
    error_line("CheckError", e.what());
    return 4;
  }
}

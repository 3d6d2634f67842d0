#pragma once

// Command dispatch shared by the multsys tool and the tests.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace multsys::cli {

struct RunConfig {
  std::string command;  // analyze | reduce | khintchine | tail | lacunary | select | rubinshtein
  std::string system;   // builtin name or path
  std::string family = "full";
  std::string out;      // report path; stdout when empty
  std::string csv;      // optional CSV export path
  unsigned threads = 1;
  bool no_meta = false;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;

  std::vector<std::string> coeffs;  // default: all ones
  std::vector<std::string> lambdas;
  std::vector<std::string> phis;    // default depends on the command
  double p = 4.0;
  std::string mode = "general";     // general | even

  std::string rule;                 // geometric:<lambda>:<tau1> | explicit:<t1>,<t2>,...
  std::optional<double> lambda_claim;
  std::size_t n = 0;
  std::size_t nu_max = 0;

  std::size_t rho = 8;
  std::size_t steps = 2;

  std::string f;                    // generator path
  std::optional<std::size_t> l;
};

/// The resolved configuration as echoed into reports.
nlohmann::json config_json(const RunConfig& config);

/// Builds the report for one command without writing anything.
/// Throws multsys::Error on input problems.
nlohmann::json build_report(const RunConfig& config);

/// True when every entry of report["verdicts"] holds.
bool all_verdicts_hold(const nlohmann::json& report);

/// Runs a command end to end. Exit status: 0 all verified, 1 some check
/// failed, 2 input or parse error (message on `err`).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace multsys::cli

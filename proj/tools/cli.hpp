#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cramerlab::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kModelError = 3,
  kAssertionFailure = 4,
};

struct RunConfig {
  std::string command;
  std::string model = "two_state:rho=0.4";
  std::size_t n = 1024;
  std::optional<std::size_t> m;
  std::optional<double> beta;
  std::string purpose = "cramer";
  double x_min = 0.0;
  double x_max = 3.0;
  std::size_t x_count = 31;
  std::string mode = "auto";  // exact | mc | auto
  std::size_t chains = 0;     // 0 picks a default in mc mode
  std::uint64_t seed = 1;
  std::string gate_mode = "practical";
  double envelope_c = 1.0;
  double be_c = 1.0;
  double alpha0 = 0.5;
  double alpha = 1.0;
  double c_alpha = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double tol = 1e-10;
  std::size_t draws = 100000;
  double mdp_c = 1.0;
  double mdp_a = 0.25;
  std::vector<std::size_t> n_grid;
  std::string out = ".";
  unsigned threads = 1;
  std::string config_file;
};

/// Canonical JSON of the settings that determine results (threads and paths excluded).
std::string canonical_config(const RunConfig& config);

/// Parses argv and runs one subcommand. Returns an ExitCode value.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cramerlab::cli

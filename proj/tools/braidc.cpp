// braidc --theta <rad> --max-len <L> [--mitm] [--strict-phase]
//
// Prints {word, distance, distance_strict, length} for the best braid word
// approximating U_theta.

#include <iostream>

#include "CLI11.hpp"

#include "avn/braid.hpp"
#include "avn/serialize.hpp"

#include "cli_common.hpp"

int main(int argc, char** argv) {
  using namespace avn::braid;
  namespace cli = avn::cli;

  CLI::App app{"Fibonacci-anyon braid compiler for U_theta = [[cos, sin], [sin, -cos]]"};
  std::string theta = "pi/6";
  std::size_t max_len = 14;
  bool mitm = false, strict = false;
  double bucket_tol = 1e-2;
  std::size_t memory_mb = 1024;
  app.add_option("--theta", theta, "gate angle in radians ('pi/6', '-pi/3' accepted)")->required();
  app.add_option("--max-len", max_len, "maximum word length")->required();
  app.add_flag("--mitm", mitm, "meet-in-the-middle over halves of length max-len/2");
  app.add_flag("--strict-phase", strict, "optimize the phase-sensitive distance");
  app.add_option("--bucket-tol", bucket_tol, "meet-in-the-middle bucket size");
  app.add_option("--memory-mb", memory_mb, "meet-in-the-middle table budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kConfigError;
  }

  try {
    const GateTarget target(cli::parse_angle(theta));
    const auto mode = strict ? PhaseMode::strict : PhaseMode::projective;
    SearchResult r;
    if (mitm) {
      MitmOptions opt;
      opt.bucket_tol = bucket_tol;
      opt.memory_budget = memory_mb << 20U;
      opt.warn = [](const std::string& w) { std::cerr << "braidc: " << w << '\n'; };
      r = mitm_search(target, max_len / 2, opt, mode);
    } else {
      r = brute_force_search(target, max_len, mode);
    }
    std::cout << to_json(r).dump(2) << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "braidc: " << e.what() << '\n';
    return cli::kConfigError;
  }
  return cli::kOk;
}

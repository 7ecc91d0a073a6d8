// Acceptance gate: one line per criterion, exit 0 only when every requested
// criterion passes. Run a single criterion with --only N (repeatable).
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pzf/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"probabilistic zero forcing acceptance suite"};
  std::uint64_t seed = 0;
  std::vector<int> only;
  std::string out_dir = "./acceptance_out";
  app.add_option("--seed", seed, "master seed for every randomized criterion")->required();
  app.add_option("--only", only, "criterion ids to run (default: all)");
  app.add_option("--out", out_dir, "directory for result artifacts");
  CLI11_PARSE(app, argc, argv);

  const int failures = pzf::run_acceptance(only, seed, out_dir, std::cout);
  return failures == 0 ? 0 : 1;
}

#ifndef PZF_ACCEPTANCE_HPP
#define PZF_ACCEPTANCE_HPP

// The release gate: eleven numbered end-to-end checks with pinned tolerances
// and runtime budgets. Each check reports pass/fail plus a detail line; the
// runner never weakens a bound to go green, so a red line is a real finding
// about either the code or the claim it exercises.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pzf {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0;
  std::string detail;
};

std::vector<int> acceptance_ids();  // 1..11

// Runs one criterion. Files the check produces (JSONL, CSV) land in out_dir,
// which is created if missing. All randomness derives from seed.
CriterionResult run_acceptance_criterion(int id, std::uint64_t seed, const std::string& out_dir);

// Runs the given criteria (all of them when ids is empty) in ascending order,
// printing one "[PASS]/[FAIL] criterion N" line each. Returns the number of
// failures.
int run_acceptance(std::vector<int> ids, std::uint64_t seed, const std::string& out_dir,
                   std::ostream& log);

}  // namespace pzf

#endif  // PZF_ACCEPTANCE_HPP

#ifndef PZF_BOUNDS_HPP
#define PZF_BOUNDS_HPP

// Closed-form predictors and run diagnostics: propagation-time bound
// formulas, the Chernoff tail helper, phase thresholds, the eta recursion,
// and good-round audits of recorded trajectories. Asymptotic slack ("o(1)",
// implicit constants) is dropped everywhere; callers add explicit tolerances.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pzf/forcing.hpp"

namespace pzf {

struct BoundPrediction {
  double lower = 0;
  double upper = 0;
  std::string regime;              // which term dominates the lower bound
  bool outside_hypothesis = false; // p*n <= ln n: formulas evaluated anyway
};

// upper = log2 log2 n + log3(1/p); lower = max(log2 log2 n, log4(1/p)).
// Requires n >= 16 so the iterated logs are positive; p in (0, 1].
BoundPrediction predict_bounds(std::uint64_t n, double p);

// 2 exp(-eps^2 mean / 3), the two-sided relative-deviation tail. eps must lie
// in (0, 3/2); the value may exceed 1 and is clamped only to [0, 2].
double chernoff_tail(double eps, double mean);

struct PhaseThresholds {
  double omega = 0, d = 0, growth = 0;  // growth = 3(1 - omega^{-1/4})
  double t1 = 0, t2 = 0, t3 = 0, t4 = 0;
  double b1 = 0, b2 = 0, b3 = 0, b4 = 0;
  bool no_phase2 = false;  // b2 <= b1: the middle growth phase does not occur

  std::vector<std::pair<std::string, double>> named_b() const {
    return {{"b1", b1}, {"b2", b2}, {"b3", b3}, {"b4", b4}};
  }
};

// Round/blue-count thresholds between the four growth phases, natural logs
// throughout. Requires n >= 16, 0 < p <= 1, omega > 1; additionally
// omega > (3/2)^4 when the middle phase exists, so the growth base exceeds 1.
PhaseThresholds phase_thresholds(std::uint64_t n, double p, double omega);

struct EtaSequence {
  double eps = 0;  // p^{c1/3}
  double c1 = 0, c2 = 0;
  std::vector<double> values;  // eta_0 .. eta_count
  double envelope = 0;         // 3 eps + 12 p^{(1-c2)/2}
  bool envelope_ok = false;
  std::optional<std::size_t> first_envelope_violation;
  std::optional<double> fixed_point;  // exists iff eps < 1/2
};

// Iterates eta_{j+1} = (3/4 + eps/2) eta_j + (3/2) eps + 6 p^{(1-c2)/2} from
// eta_0 = 0 and checks every term against the envelope above. eta_j stays
// under the envelope iff 1 + r + ... + r^{j-1} <= 2 for r = 3/4 + eps/2, and
// 1 + r + r^2 > 2 already, so eta_3 exceeds the envelope at every admissible
// parameter point; the result reports the first violating index rather than
// asserting. The fixed point exists iff eps < 1/2.
EtaSequence eta_sequence(double p, double c1, double c2, std::size_t count);

struct RoundAuditEntry {
  std::uint32_t round = 0;
  bool good = false;
  bool p1_audited = false;  // dense only: white-degree property checked
};

struct RoundAudit {
  std::string regime;
  std::vector<RoundAuditEntry> rounds;  // rounds 1..R of the record
  std::optional<std::uint32_t> first_bad;
};

struct AuditParams {
  double c1 = 0, c2 = 0;  // sparse regime only
};

// Dense: round i is good iff y_i <= 3 b_{i-1}^2, plus, when the record
// carries max white-to-frontier degrees, w_deg_{i-1} <= 2 p y_{i-1}.
// Sparse: round j is good iff y_j <= (3 + eta_{j-1})(1 + eps) b_{j-1} and
// the average blue degree 2 e_j / b_j <= 2 + eta_j; needs blue-edge counts.
RoundAudit audit_rounds(const TrialRecord& record, double p, const std::string& regime,
                        const AuditParams& params = {});

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double max_residual = 0;
};

// Least squares y = intercept + slope * x; throws on fewer than 2 points or
// a degenerate regressor.
FitResult fit_line(const std::vector<std::pair<double, double>>& points);

}  // namespace pzf

#endif  // PZF_BOUNDS_HPP

#include "pzf/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pzf {

namespace {

double log2log2(std::uint64_t n) { return std::log2(std::log2(static_cast<double>(n))); }

void check_n_p(std::uint64_t n, double p) {
  if (n < 16) throw std::invalid_argument("bounds: n must be at least 16");
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("bounds: p must lie in (0, 1]");
}

}  // namespace

BoundPrediction predict_bounds(std::uint64_t n, double p) {
  check_n_p(n, p);
  const double ll = log2log2(n);
  const double linv = std::log(1.0 / p);
  BoundPrediction out;
  out.upper = ll + linv / std::log(3.0);
  out.lower = std::max(ll, linv / std::log(4.0));
  out.regime = ll >= linv / std::log(4.0) ? "dense" : "sparse";
  out.outside_hypothesis = p * static_cast<double>(n) <= std::log(static_cast<double>(n));
  return out;
}

double chernoff_tail(double eps, double mean) {
  if (!(eps > 0.0) || !(eps < 1.5)) throw std::invalid_argument("chernoff_tail: eps must lie in (0, 3/2)");
  if (!(mean >= 0.0)) throw std::invalid_argument("chernoff_tail: mean must be nonnegative");
  return std::clamp(2.0 * std::exp(-eps * eps * mean / 3.0), 0.0, 2.0);
}

PhaseThresholds phase_thresholds(std::uint64_t n, double p, double omega) {
  check_n_p(n, p);
  if (!(omega > 1.0)) throw std::invalid_argument("phase_thresholds: omega must exceed 1");
  const double nn = static_cast<double>(n);
  const double lln = std::log(std::log(nn));
  const double llln = std::log(lln);
  if (!(llln > 0.0)) throw std::invalid_argument("phase_thresholds: n too small for iterated logs");

  PhaseThresholds t;
  t.omega = omega;
  t.d = p * (nn - 1.0);
  t.growth = 3.0 * (1.0 - std::pow(omega, -0.25));
  t.t1 = t.t3 = lln / llln;
  t.b1 = t.t1 * (1.0 - llln / lln);
  t.b2 = nn / (t.d * omega);
  if (t.b2 <= t.b1) {
    t.no_phase2 = true;
    t.t2 = 0.0;
  } else {
    if (!(t.growth > 1.0))
      throw std::invalid_argument("phase_thresholds: omega too small, growth base at most 1");
    t.t2 = std::log(t.b2 / t.b1) / std::log(t.growth);
  }
  t.b3 = nn * lln / (t.d * llln * llln);
  t.t4 = log2log2(n);
  t.b4 = std::sqrt(nn / (p * omega));
  return t;
}

EtaSequence eta_sequence(double p, double c1, double c2, std::size_t count) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("eta_sequence: p must lie in (0, 1)");
  if (!(c1 > 0.0) || !(c1 < c2) || !(c2 < 1.0))
    throw std::invalid_argument("eta_sequence: need 0 < c1 < c2 < 1");
  if (count < 1) throw std::invalid_argument("eta_sequence: count must be positive");

  EtaSequence s;
  s.eps = std::pow(p, c1 / 3.0);
  s.c1 = c1;
  s.c2 = c2;
  const double tail = std::pow(p, (1.0 - c2) / 2.0);
  const double ratio = 0.75 + s.eps / 2.0;
  const double add = 1.5 * s.eps + 6.0 * tail;
  s.envelope = 3.0 * s.eps + 12.0 * tail;

  s.values.resize(count + 1);
  s.values[0] = 0.0;
  for (std::size_t j = 0; j < count; ++j) s.values[j + 1] = ratio * s.values[j] + add;

  for (std::size_t j = 0; j < s.values.size(); ++j) {
    if (s.values[j] > s.envelope) {
      s.first_envelope_violation = j;
      break;
    }
  }
  s.envelope_ok = !s.first_envelope_violation.has_value();
  if (ratio < 1.0) s.fixed_point = add / (1.0 - ratio);
  return s;
}

RoundAudit audit_rounds(const TrialRecord& record, double p, const std::string& regime,
                        const AuditParams& params) {
  if (record.b_trajectory.empty()) throw std::invalid_argument("audit_rounds: record has no trajectory");
  const auto& b = record.b_trajectory;
  const std::size_t rounds = b.size() - 1;

  RoundAudit audit;
  audit.regime = regime;
  audit.rounds.reserve(rounds);

  auto y = [&](std::size_t i) {  // new blue in round i, y_0 = initial blue
    return i == 0 ? static_cast<double>(b[0]) : static_cast<double>(b[i]) - static_cast<double>(b[i - 1]);
  };

  if (regime == "dense") {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("audit_rounds: p must lie in (0, 1]");
    const auto& wdeg = record.w_deg_trajectory;
    if (wdeg && wdeg->size() != b.size())
      throw std::invalid_argument("audit_rounds: white-degree trajectory length mismatch");
    for (std::size_t i = 1; i <= rounds; ++i) {
      RoundAuditEntry e;
      e.round = static_cast<std::uint32_t>(i);
      const double prev = static_cast<double>(b[i - 1]);
      bool good = y(i) <= 3.0 * prev * prev;
      if (wdeg) {
        e.p1_audited = true;
        // (*wdeg)[i-1] is the max white-to-frontier degree entering round i.
        good = good && static_cast<double>((*wdeg)[i - 1]) <= 2.0 * p * y(i - 1);
      }
      e.good = good;
      audit.rounds.push_back(e);
    }
  } else if (regime == "sparse") {
    const auto& eb = record.e_blue_trajectory;
    if (!eb) throw std::invalid_argument("audit_rounds: sparse audit needs blue-edge counts");
    if (eb->size() != b.size())
      throw std::invalid_argument("audit_rounds: blue-edge trajectory length mismatch");
    const EtaSequence eta = eta_sequence(p, params.c1, params.c2, std::max<std::size_t>(rounds, 1));
    for (std::size_t j = 1; j <= rounds; ++j) {
      RoundAuditEntry e;
      e.round = static_cast<std::uint32_t>(j);
      const double prev = static_cast<double>(b[j - 1]);
      const bool growth_ok = y(j) <= (3.0 + eta.values[j - 1]) * (1.0 + eta.eps) * prev;
      const double avg_deg =
          b[j] == 0 ? 0.0 : 2.0 * static_cast<double>((*eb)[j]) / static_cast<double>(b[j]);
      e.good = growth_ok && avg_deg <= 2.0 + eta.values[j];
      audit.rounds.push_back(e);
    }
  } else {
    throw std::invalid_argument("audit_rounds: regime must be dense or sparse");
  }

  for (const auto& e : audit.rounds) {
    if (!e.good) {
      audit.first_bad = e.round;
      break;
    }
  }
  return audit;
}

FitResult fit_line(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("fit_line: need at least 2 points");
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_line: degenerate regressor");
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (const auto& [x, y] : points)
    f.max_residual = std::max(f.max_residual, std::abs(y - (f.intercept + f.slope * x)));
  return f;
}

}  // namespace pzf

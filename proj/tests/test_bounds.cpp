#include <doctest.h>

#include <cmath>

#include "pzf/bounds.hpp"
#include "pzf/forcing.hpp"

using namespace pzf;

TEST_CASE("bound predictions at pinned points") {
  const BoundPrediction b = predict_bounds(65536, 0.5);
  CHECK(b.upper == doctest::Approx(4.0 + std::log(2.0) / std::log(3.0)).epsilon(1e-12));
  CHECK(b.lower == 4.0);
  CHECK(b.regime == "dense");
  CHECK(!b.outside_hypothesis);

  // p = 4^-10: the sparse term takes over the lower bound exactly.
  const BoundPrediction sparse = predict_bounds(65536, std::pow(4.0, -10.0));
  CHECK(sparse.lower == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(sparse.regime == "sparse");

  const BoundPrediction certain = predict_bounds(65536, 1.0);
  CHECK(certain.upper == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(certain.lower == 4.0);
}

TEST_CASE("bound predictions reject bad parameters and warn out of hypothesis") {
  CHECK_THROWS_AS(predict_bounds(8, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(predict_bounds(100, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(predict_bounds(100, 1.5), std::invalid_argument);
  CHECK(predict_bounds(100, 0.01).outside_hypothesis);   // pn = 1 <= ln 100
  CHECK(!predict_bounds(100, 0.5).outside_hypothesis);
}

TEST_CASE("lower never exceeds upper in the connectivity regime") {
  for (int i = 0; i < 100; ++i) {
    const double n = 16 + i * 1000;
    const double p = std::max(1.0 / n, (i + 1) / 101.0);
    const BoundPrediction b = predict_bounds(static_cast<std::uint64_t>(n), p);
    CHECK(b.lower <= b.upper);
  }
}

TEST_CASE("chernoff tail evaluates and clamps") {
  CHECK(chernoff_tail(1.0, 0.0) == 2.0);
  CHECK(chernoff_tail(1.0, 3.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(chernoff_tail(1.0, 3.0 * std::log(2e6)) <= 1e-6 + 1e-18);
  CHECK_THROWS_AS(chernoff_tail(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(chernoff_tail(1.5, 1.0), std::invalid_argument);
  // Monotone decreasing in both arguments.
  double prev = 2.0;
  for (double mean : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double v = chernoff_tail(0.7, mean);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(chernoff_tail(1.2, 5.0) <= chernoff_tail(0.6, 5.0));
}

TEST_CASE("phase thresholds at the pinned evaluation point") {
  const PhaseThresholds t = phase_thresholds(1000000, 0.5, 10.0);
  CHECK(t.t1 == doctest::Approx(2.7203).epsilon(2e-4));
  CHECK(t.t3 == t.t1);
  CHECK(t.t4 == doctest::Approx(std::log2(std::log2(1e6))).epsilon(1e-12));
  CHECK(t.b4 == doctest::Approx(447.2136).epsilon(1e-4));
  CHECK(t.b1 < t.b3);
  CHECK(t.t2 >= 0.0);
  // Dense p with large omega suppresses phase 2.
  CHECK(t.no_phase2);
  CHECK(t.t2 == 0.0);

  const auto named = t.named_b();
  REQUIRE(named.size() == 4);
  CHECK(named[0].first == "b1");
  CHECK(named[3].first == "b4");
  CHECK(named[3].second == doctest::Approx(t.b4));

  CHECK_THROWS_AS(phase_thresholds(8, 0.5, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(phase_thresholds(1000000, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("sparse thresholds keep phase 2 alive") {
  const PhaseThresholds t = phase_thresholds(1000000, 0.001, 10.0);
  CHECK(!t.no_phase2);
  CHECK(t.t2 > 0.0);
  CHECK(t.b1 < t.b2);
  // A growth factor at or below 1 cannot bridge b1 to b2; that is a caller
  // error, not a zero-length phase.
  CHECK_THROWS_AS(phase_thresholds(1000000, 0.001, 4.0), std::invalid_argument);
}

TEST_CASE("eta sequence converges but overruns its stated envelope") {
  const EtaSequence s = eta_sequence(1e-6, 0.9, 0.95, 60);
  CHECK(s.eps == doctest::Approx(std::pow(1e-6, 0.3)).epsilon(1e-12));
  CHECK(s.values[0] == 0.0);
  REQUIRE(s.fixed_point.has_value());
  // Monotone nondecreasing toward the fixed point from below.
  for (std::size_t j = 0; j + 1 < s.values.size(); ++j) {
    CHECK(s.values[j + 1] >= s.values[j]);
    CHECK(s.values[j] <= *s.fixed_point * (1 + 1e-12));
  }
  // The envelope equals twice the additive term while the limit is four
  // times it, so the third iterate always crosses: 1 + r + r^2 > 2 for
  // every r >= 3/4.
  CHECK(!s.envelope_ok);
  REQUIRE(s.first_envelope_violation.has_value());
  CHECK(*s.first_envelope_violation == 3);
}

TEST_CASE("eta sequence with large eps diverges and violates at the second step") {
  const EtaSequence s = eta_sequence(0.01, 0.3, 0.5, 10);
  CHECK(s.eps == doctest::Approx(std::pow(0.01, 0.1)).epsilon(1e-12));
  CHECK(s.envelope == doctest::Approx(3 * s.eps + 12 * std::pow(0.01, 0.25)).epsilon(1e-12));
  CHECK(s.envelope == doctest::Approx(5.6876).epsilon(1e-3));
  CHECK(!s.fixed_point.has_value());  // eps >= 1/2, the recursion diverges
  REQUIRE(s.first_envelope_violation.has_value());
  CHECK(*s.first_envelope_violation == 2);  // 1 + r > 2 once r > 1
}

TEST_CASE("eta sequence rejects bad parameters") {
  CHECK_THROWS_AS(eta_sequence(0.0, 0.3, 0.5, 5), std::invalid_argument);
  CHECK_THROWS_AS(eta_sequence(0.01, 0.5, 0.3, 5), std::invalid_argument);
  CHECK_THROWS_AS(eta_sequence(0.01, 0.3, 0.5, 0), std::invalid_argument);
}

TEST_CASE("dense audit applies the squared-threshold rule") {
  TrialRecord rec;
  rec.b_trajectory = {4, 8, 16};
  AuditParams params;
  const RoundAudit ok = audit_rounds(rec, 0.25, "dense", params);
  CHECK(ok.rounds.size() == 2);
  CHECK(ok.rounds[0].good);   // 4 new <= 3 * 4^2
  CHECK(ok.rounds[1].good);   // 8 new <= 3 * 8^2
  CHECK(!ok.first_bad.has_value());
  CHECK(!ok.rounds[0].p1_audited);  // no white-degree trajectory recorded

  TrialRecord bad;
  bad.b_trajectory = {4, 8, 8 + 3 * 64 + 1};  // round 2 adds 3*b1^2 + 1 vertices
  const RoundAudit flagged = audit_rounds(bad, 0.25, "dense", params);
  CHECK(flagged.rounds[0].good);
  CHECK(!flagged.rounds[1].good);
  REQUIRE(flagged.first_bad.has_value());
  CHECK(*flagged.first_bad == 2);
}

TEST_CASE("dense audit uses the degree property when recorded") {
  TrialRecord rec;
  rec.b_trajectory = {4, 8};
  rec.w_deg_trajectory = std::vector<std::uint32_t>{1, 2};
  AuditParams params;
  const RoundAudit audit = audit_rounds(rec, 0.25, "dense", params);
  REQUIRE(audit.rounds.size() == 1);
  CHECK(audit.rounds[0].p1_audited);
  CHECK(audit.rounds[0].good);  // deg 1 <= 2 * 0.25 * 4 and 8 <= 48

  TrialRecord heavy;
  heavy.b_trajectory = {4, 8};
  heavy.w_deg_trajectory = std::vector<std::uint32_t>{3, 2};  // 3 > 2p*y0 = 2
  const RoundAudit flagged = audit_rounds(heavy, 0.25, "dense", params);
  CHECK(!flagged.rounds[0].good);
}

TEST_CASE("sparse audit needs blue edge counts") {
  TrialRecord rec;
  rec.b_trajectory = {2, 7, 20};
  AuditParams params;
  params.c1 = 0.3;
  params.c2 = 0.6;
  CHECK_THROWS_AS(audit_rounds(rec, 1e-4, "sparse", params), std::invalid_argument);

  rec.e_blue_trajectory = std::vector<std::uint64_t>{0, 6, 20};
  const RoundAudit audit = audit_rounds(rec, 1e-4, "sparse", params);
  CHECK(audit.rounds.size() == 2);
  // eta_1 tolerance easily covers 2e/b = 12/7 <= 2 and 20/7 growth under
  // (3 + eta_0)(1 + eps).
  CHECK(audit.rounds[0].good);
  CHECK(audit.regime == "sparse");
}

TEST_CASE("line fitting recovers exact affine data") {
  std::vector<std::pair<double, double>> pts;
  for (double x : {1.0, 2.0, 3.0, 4.0}) pts.emplace_back(x, 2.0 * x + 1.0);
  const FitResult fit = fit_line(pts);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.max_residual <= 1e-12);
  CHECK_THROWS_AS(fit_line({{1.0, 2.0}, {1.0, 3.0}}), std::invalid_argument);
}

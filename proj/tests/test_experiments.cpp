#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "bsasim/experiments.hpp"

using namespace bsa;

namespace {

const std::vector<InputKind> kBellInputs{InputKind::PhiPlus, InputKind::PhiMinus,
                                         InputKind::PsiPlus, InputKind::PsiMinus};

int identifying_index(InputKind k) {
  switch (k) {
    case InputKind::PhiPlus: return 0;   // ++
    case InputKind::PhiMinus: return 1;  // -+
    case InputKind::PsiPlus: return 2;   // +-
    case InputKind::PsiMinus: return 3;  // --
    default: throw std::logic_error("no identifying setting");
  }
}

}  // namespace

TEST_CASE("ideal analyzer reproduces the truth table exactly") {
  const CircuitConfig cfg;
  const BsaResult r = run_bsa(cfg, kBellInputs, SampleSpec{});
  REQUIRE(r.rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const BsaRow& row = r.rows[i];
    const int correct = identifying_index(kBellInputs[i]);
    for (int j = 0; j < 4; ++j) {
      if (j == correct)
        CHECK(std::abs(row.probabilities[j] - 1.0 / 16.0) < 1e-12);
      else
        CHECK(row.probabilities[j] < 1e-12);
    }
    REQUIRE(row.has_fidelity);
    CHECK(row.fidelity.value == doctest::Approx(1.0));
    CHECK(row.fidelity.sigma == 0.0);
    CHECK(std::abs(row.fourfold_probability - 0.25) < 1e-12);
  }
  CHECK(r.average_fidelity == doctest::Approx(1.0));
}

TEST_CASE("outcome-resolving detection identifies every bell state at 1/4") {
  CircuitConfig cfg;
  cfg.outcome_resolving = true;
  const BsaResult r = run_bsa(cfg, kBellInputs, SampleSpec{});
  for (const BsaRow& row : r.rows)
    CHECK(std::abs(row.success_probability - 0.25) < 1e-12);
}

TEST_CASE("circuit evolution is norm-preserving and sector-preserving") {
  CircuitConfig cfg;
  const QuantumState src = bsa_source(cfg);
  CHECK(src.norm() == doctest::Approx(1.0));
  const QuantumState out = evolve_circuit(cfg, src);
  CHECK(out.norm() == doctest::Approx(1.0));
  // The four-photon weight is untouched by the (unitary) analyzer optics.
  CHECK(photon_number_sector(out, 4).norm2() ==
        doctest::Approx(photon_number_sector(src, 4).norm2()));
}

TEST_CASE("truncation defaults follow the source order") {
  CircuitConfig cfg;
  CHECK(cfg.effective_truncation() == 4);
  cfg.spdc.order = 2;
  CHECK(cfg.effective_truncation() == 8);
  cfg.truncation = 12;
  CHECK(cfg.effective_truncation() == 12);
}

TEST_CASE("teleported encoding heralds the ancilla qubit with unit fidelity") {
  const CircuitConfig cfg;
  const cplx qubits[][2] = {
      {cplx{1.0, 0.0}, cplx{0.0, 0.0}},
      {cplx{0.6, 0.0}, cplx{0.0, 0.8}},
      {cplx{1.0 / std::sqrt(2.0), 0.0}, cplx{-1.0 / std::sqrt(2.0), 0.0}},
  };
  for (const auto& q : qubits) {
    const EncodingResult r = run_encoding(cfg, q[0], q[1]);
    CHECK(std::abs(r.fidelity - 1.0) < 1e-9);
    CHECK(r.success_probability == doctest::Approx(0.25));
    CHECK(r.output.norm() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(run_encoding(cfg, cplx{1.0, 0.0}, cplx{1.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("double-emission background follows cos^2 of twice the rotator angle") {
  CircuitConfig cfg;
  cfg.spdc.order = 2;
  const std::vector<double> thetas{0.0, 10.0 * kPi / 180.0, kPi / 8.0,
                                   30.0 * kPi / 180.0, kPi / 4.0};
  const auto points = theta_scan(cfg, thetas);
  REQUIRE(points.size() == thetas.size());
  CHECK(points[0].ratio == doctest::Approx(1.0));
  for (const auto& p : points) CHECK(p.cos2_residual < 1e-9);
  CHECK(points.back().spurious_probability < 1e-12);  // 45 degrees kills it
  for (const auto& p : points) {
    CHECK(p.full_fraction >= 0.0);
    CHECK(p.full_fraction <= 1.0);
  }

  CircuitConfig order1;
  CHECK_THROWS_AS(theta_scan(order1, thetas), std::invalid_argument);
}

TEST_CASE("pair fringes lose contrast as the wavepacket overlap squared") {
  CircuitConfig cfg;
  const std::vector<double> vs{0.0, 0.5, 0.9, 1.0};
  const auto points = overlap_scan(cfg, vs);
  REQUIRE(points.size() == vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const double expect = vs[i] * vs[i];
    for (int pair = 0; pair < 4; ++pair)
      CHECK(std::abs(points[i].visibility[pair] - expect) < 1e-9);
  }
}

TEST_CASE("mirror displacement maps to a gaussian overlap") {
  CHECK(mirror_overlap(0.0, 1.0) == doctest::Approx(1.0));
  CHECK(mirror_overlap(2.0, 2.0) == doctest::Approx(std::exp(-0.5)));
  CHECK_THROWS_AS(mirror_overlap(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("phi+/phi- superposition splits between the two phi settings") {
  CircuitConfig cfg;
  cfg.prep.kind = InputKind::Superposition;
  cfg.prep.sup_phi_plus = cplx{1.0 / std::sqrt(2.0), 0.0};
  cfg.prep.sup_phi_minus = cplx{0.0, 1.0 / std::sqrt(2.0)};
  const BsaResult r = run_bsa(cfg, {InputKind::Superposition}, SampleSpec{});
  REQUIRE(r.rows.size() == 1);
  const BsaRow& row = r.rows[0];
  CHECK_FALSE(row.has_fidelity);
  CHECK(std::abs(row.probabilities[0] - 1.0 / 32.0) < 1e-12);  // phi+ setting
  CHECK(std::abs(row.probabilities[1] - 1.0 / 32.0) < 1e-12);  // phi- setting
  CHECK(row.probabilities[2] < 1e-12);
  CHECK(row.probabilities[3] < 1e-12);
  CHECK(std::abs(row.success_probability - 1.0 / 16.0) < 1e-12);
}

TEST_CASE("hv port correlations decay with the pbs extinction") {
  CircuitConfig cfg;
  CHECK(std::abs(hv_port_correlation_visibility(cfg) - 1.0) < 1e-9);
  cfg.pbs_eps_t = 0.02;
  cfg.pbs_eps_r = 0.02;
  const double expect = (1.0 - 2.0 * 0.02) * (1.0 - 2.0 * 0.02);
  CHECK(std::abs(hv_port_correlation_visibility(cfg) - expect) < 1e-9);
}

TEST_CASE("diagonal pair visibility decays linearly with dephasing") {
  CircuitConfig cfg;
  CHECK(std::abs(pair_diag_visibility(cfg) - 1.0) < 1e-9);
  cfg.prep.dephasing = 0.15;
  CHECK(std::abs(pair_diag_visibility(cfg) - 0.85) < 1e-9);
}

TEST_CASE("calibration with perfect targets returns the ideal configuration") {
  const CalibrationResult r = calibrate_imperfections(1.0, 1.0, CircuitConfig{});
  CHECK(std::abs(r.backward_overlap - 1.0) < 1e-9);
  CHECK(std::abs(r.pbs_epsilon) < 1e-9);
  CHECK(std::abs(r.dephasing) < 1e-9);
  CHECK(r.exact_average_fidelity == doctest::Approx(1.0));
}

TEST_CASE("calibration reproduces the measured visibilities") {
  const CalibrationResult r = calibrate_imperfections(0.96, 0.94, CircuitConfig{});
  CHECK(std::abs(r.achieved_hv - 0.96) < 1e-3);
  CHECK(std::abs(r.achieved_diag - 0.94) < 1e-3);
  // Frozen solution of the three one-parameter inversions.
  CHECK(r.pbs_epsilon == doctest::Approx(0.010102051443482196).epsilon(1e-6));
  CHECK(r.dephasing == doctest::Approx(0.06).epsilon(1e-6));
  CHECK(r.backward_overlap == doctest::Approx(std::sqrt(0.94)).epsilon(1e-6));
  CHECK(r.config.spdc.order == 2);
  // Degraded gate lands in the experimentally plausible fidelity band.
  CHECK(r.exact_average_fidelity > 0.70);
  CHECK(r.exact_average_fidelity < 0.90);
}

TEST_CASE("sampled analyzer runs are reproducible by seed") {
  CircuitConfig cfg;
  SampleSpec sample;
  sample.exact = false;
  sample.shots = 400;
  sample.seed = 5;
  const BsaResult a = run_bsa(cfg, kBellInputs, sample);
  const BsaResult b = run_bsa(cfg, kBellInputs, sample);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    CHECK(a.rows[i].counts == b.rows[i].counts);

  sample.seed = 6;
  const BsaResult c = run_bsa(cfg, kBellInputs, sample);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    if (a.rows[i].counts != c.rows[i].counts) any_diff = true;
  CHECK(any_diff);

  // Ideal circuit: every count lands on the identifying setting.
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const int correct = identifying_index(kBellInputs[i]);
    for (int j = 0; j < 4; ++j)
      if (j != correct) CHECK(a.rows[i].counts[j] == 0);
    CHECK(a.rows[i].counts[correct] > 300);
    CHECK(a.rows[i].fidelity.value == doctest::Approx(1.0));
  }
}

TEST_CASE("zero overlap removes the interference entirely") {
  CircuitConfig cfg;
  cfg.spdc.backward_overlap = 0.0;
  const BsaResult r = run_bsa(cfg, kBellInputs, SampleSpec{});
  CHECK(r.average_fidelity < 0.9);
  CHECK(r.average_fidelity > 0.0);
  // Distinguishable photons still produce fourfolds, just uninformative ones.
  for (const BsaRow& row : r.rows) CHECK(row.fourfold_probability > 0.0);
}

TEST_CASE("analyzer tables re-parse into the structure that produced them") {
  const CircuitConfig cfg;
  const BsaResult exact = run_bsa(cfg, kBellInputs, SampleSpec{});

  const std::string js = to_json(exact);
  const BsaResult from_js = bsa_result_from_json(js);
  CHECK(to_json(from_js) == js);
  REQUIRE(from_js.rows.size() == 4);
  CHECK_FALSE(from_js.sampled);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(from_js.rows[i].input == exact.rows[i].input);
    for (int j = 0; j < 4; ++j)
      CHECK(from_js.rows[i].probabilities[j] == exact.rows[i].probabilities[j]);
    CHECK(from_js.rows[i].has_fidelity == exact.rows[i].has_fidelity);
    CHECK(from_js.rows[i].fidelity.value == exact.rows[i].fidelity.value);
  }
  CHECK(from_js.average_fidelity == exact.average_fidelity);

  const std::string cs = to_csv(exact);
  const BsaResult from_cs = bsa_result_from_csv(cs);
  CHECK(to_csv(from_cs) == cs);
  for (std::size_t i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(from_cs.rows[i].probabilities[j] == exact.rows[i].probabilities[j]);
  // The probability table carries nothing else; the rest stays default.
  CHECK_FALSE(from_cs.rows[0].has_fidelity);
  CHECK(from_cs.rows[0].fourfold_probability == 0.0);

  CHECK_THROWS_AS(bsa_result_from_csv("input,setting,counts,duration_s,seed\n"),
                  std::invalid_argument);

  SampleSpec sample;
  sample.exact = false;
  sample.shots = 450;
  sample.seed = 7;
  const BsaResult sampled = run_bsa(cfg, {InputKind::PsiMinus}, sample);
  const std::string sj = to_json(sampled);
  const BsaResult sampled_back = bsa_result_from_json(sj);
  CHECK(to_json(sampled_back) == sj);
  CHECK(sampled_back.sampled);
  CHECK(sampled_back.seed == sampled.seed);
  CHECK(sampled_back.shots == sampled.shots);
  CHECK(sampled_back.rows.at(0).counts == sampled.rows.at(0).counts);
  // The sampled CSV is the count table, owned by its own parser.
  CHECK(to_csv(table_from_csv(to_csv(sampled))) == to_csv(sampled));
}

TEST_CASE("encoding and superposition renderings round trip") {
  const CircuitConfig cfg;
  const EncodingResult enc = run_encoding(cfg, cplx{0.6, 0.0}, cplx{0.0, 0.8});

  const std::string js = to_json(enc);
  const EncodingResult from_js = encoding_from_json(js);
  CHECK(to_json(from_js) == js);
  CHECK(from_js.alpha == enc.alpha);
  CHECK(from_js.beta == enc.beta);
  CHECK(from_js.fidelity == enc.fidelity);
  CHECK(from_js.success_probability == enc.success_probability);

  const std::string cs = to_csv(enc);
  const EncodingResult from_cs = encoding_from_csv(cs);
  CHECK(to_csv(from_cs) == cs);
  CHECK(from_cs.fidelity == enc.fidelity);
  CHECK(from_cs.alpha == cplx{});  // not in the CSV

  CircuitConfig sup = cfg;
  sup.prep.kind = InputKind::Superposition;
  sup.prep.sup_phi_plus = cplx{1.0 / std::sqrt(2.0), 0.0};
  sup.prep.sup_phi_minus = cplx{0.0, 1.0 / std::sqrt(2.0)};
  const std::vector<InputKind> one{InputKind::Superposition};

  const SuperpositionSummary s =
      summarize_superposition(run_bsa(sup, one, SampleSpec{}));
  CHECK(s.phi_plus_weight == doctest::Approx(0.5));
  const std::string ss = to_json(s);
  const SuperpositionSummary s_back = superposition_from_json(ss);
  CHECK(to_json(s_back) == ss);
  CHECK_FALSE(s_back.sampled);
  CHECK(s_back.phi_minus_weight == s.phi_minus_weight);

  SampleSpec sample;
  sample.exact = false;
  sample.shots = 200;
  sample.seed = 3;
  const SuperpositionSummary t =
      summarize_superposition(run_bsa(sup, one, sample));
  const std::string ts = to_json(t);
  const SuperpositionSummary t_back = superposition_from_json(ts);
  CHECK(to_json(t_back) == ts);
  CHECK(t_back.sampled);
  CHECK(t_back.counts == t.counts);
  CHECK(t_back.seed == t.seed);

  CHECK_THROWS_AS(summarize_superposition(BsaResult{}), std::invalid_argument);
}

TEST_CASE("scan renderings round trip bit-for-bit") {
  // Crafted sweep: awkward angles exercise the degree/radian conversion, the
  // rest are ordinary doubles.
  std::vector<ThetaPoint> tp;
  for (int i = 0; i < 200; ++i) {
    ThetaPoint p;
    p.theta = 0.0001 + 0.0077311 * i;
    p.spurious_probability = 1.0 / (3 + i);
    p.ratio = 1.0 / (1 + i);
    p.cos2_residual = 1e-12 * i;
    p.full_fraction = i / 200.0;
    tp.push_back(p);
  }
  tp.push_back(ThetaPoint{});
  tp.push_back(ThetaPoint{kPi / 4.0, 0.0, 0.0, 0.0, 0.0});

  const CircuitConfig cfg;
  const std::string tj = theta_scan_json(cfg, tp);
  CHECK(theta_scan_json(cfg, theta_points_from_json(tj)) == tj);
  const std::string tc = theta_scan_csv(tp);
  CHECK(theta_scan_csv(theta_points_from_csv(tc)) == tc);
  // The CSV drops the ratio and full-fraction columns.
  const std::vector<ThetaPoint> tp_back = theta_points_from_csv(tc);
  CHECK(tp_back.at(5).spurious_probability == tp[5].spurious_probability);
  CHECK(tp_back.at(5).ratio == 0.0);
  CHECK(tp_back.at(5).full_fraction == 0.0);
  CHECK(theta_points_from_json(tj).at(5).ratio == tp[5].ratio);

  std::vector<OverlapPoint> op;
  for (int i = 0; i <= 20; ++i) {
    OverlapPoint p;
    p.overlap = 0.05 * i;
    for (int k = 0; k < 4; ++k)
      p.visibility[k] = p.overlap * p.overlap / (1 + 0.001 * k);
    op.push_back(p);
  }
  const std::string oj = overlap_scan_json(cfg, op);
  CHECK(overlap_scan_json(cfg, overlap_points_from_json(oj)) == oj);
  const std::string oc = overlap_scan_csv(op);
  CHECK(overlap_scan_csv(overlap_points_from_csv(oc)) == oc);
  const std::vector<OverlapPoint> op_back = overlap_points_from_csv(oc);
  for (int k = 0; k < 4; ++k)
    CHECK(op_back.at(17).visibility[k] == op[17].visibility[k]);

  CHECK_THROWS_AS(theta_points_from_csv("wrong,header\n1,2\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(overlap_points_from_csv("overlap,vis_ab,vis_cd,vis_ad,vis_cb\n"
                                          "0.5,1,2\n"),
                  std::invalid_argument);
}

TEST_CASE("calibration renderings round trip") {
  CalibrationResult cal;
  cal.backward_overlap = 0.9695359714828555;
  cal.pbs_epsilon = 0.010102051443482196;
  cal.dephasing = 0.05999999999994543;
  cal.achieved_hv = 1.0;  // integral double: rendering must stay stable
  cal.achieved_diag = 0.9400000000000546;
  cal.achieved_overlap = 0.8900434146186249;
  cal.config.spdc.chi = 0.1;
  cal.config.spdc.order = 2;
  cal.exact_average_fidelity = 0.7936138046035812;

  const std::string js = to_json(cal);
  const CalibrationResult from_js = calibration_from_json(js);
  CHECK(to_json(from_js) == js);
  CHECK(from_js.dephasing == cal.dephasing);
  CHECK(from_js.config.spdc.order == 2);
  CHECK(from_js.config.pbs_eps_t == cal.pbs_epsilon);
  CHECK(from_js.config.pbs_eps_r == cal.pbs_epsilon);
  CHECK(from_js.config.prep.dephasing == cal.dephasing);
  CHECK(from_js.config.ancilla_dephasing == cal.dephasing);
  CHECK(from_js.config.spdc.backward_overlap == cal.backward_overlap);

  const std::string cs = to_csv(cal);
  const CalibrationResult from_cs = calibration_from_csv(cs);
  CHECK(to_csv(from_cs) == cs);
  CHECK(from_cs.achieved_hv == 1.0);
  CHECK(from_cs.exact_average_fidelity == cal.exact_average_fidelity);
  // chi and the emission order are not in the table.
  CHECK(from_cs.config.spdc.chi == SpdcSpec{}.chi);
  CHECK(from_cs.config.spdc.order == SpdcSpec{}.order);

  CHECK_THROWS_AS(calibration_from_csv("parameter,value\ndephasing,0.1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(calibration_from_csv("parameter,value\nnonsense,0.1\n"),
                  std::invalid_argument);
}

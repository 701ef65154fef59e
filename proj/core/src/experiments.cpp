#include "bsasim/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace bsa {

namespace {

using json = nlohmann::ordered_json;

PbsSpec upper_pbs(const CircuitConfig& cfg) {
  PbsSpec s;
  s.in1 = Spatial::S1;
  s.in2 = Spatial::S3;
  s.out1 = Spatial::A;
  s.out2 = Spatial::C;
  s.eps_t = cfg.pbs_eps_t;
  s.eps_r = cfg.pbs_eps_r;
  return s;
}

PbsSpec lower_pbs(const CircuitConfig& cfg) {
  PbsSpec s;
  s.in1 = Spatial::S2;
  s.in2 = Spatial::S4;
  s.out1 = Spatial::B;
  s.out2 = Spatial::D;
  s.eps_t = cfg.pbs_eps_t;
  s.eps_r = cfg.pbs_eps_r;
  return s;
}

std::size_t setting_index(const Setting& s) {
  return (s.a == PolSign::Minus ? 1u : 0u) + (s.b == PolSign::Minus ? 2u : 0u);
}

BellKind to_bell(InputKind k) {
  switch (k) {
    case InputKind::PhiPlus:
      return BellKind::PhiPlus;
    case InputKind::PhiMinus:
      return BellKind::PhiMinus;
    case InputKind::PsiPlus:
      return BellKind::PsiPlus;
    case InputKind::PsiMinus:
      return BellKind::PsiMinus;
    case InputKind::Superposition:
      break;
  }
  throw std::logic_error("no Bell analogue for this input");
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, p);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    throw std::invalid_argument("bad floating-point field: " + text);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Data rows of a CSV document, header checked, blank lines skipped.
std::vector<std::vector<std::string>> csv_rows(const std::string& text,
                                               const std::string& header,
                                               std::size_t n_fields) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw std::invalid_argument("expected CSV header: " + header);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != n_fields)
      throw std::invalid_argument("bad CSV row: " + line);
    rows.push_back(std::move(fields));
  }
  return rows;
}

// The emitters write angles as fl(theta * 180 / pi), and chaining the reverse
// conversion can land an ulp or two off; walk to the nearest preimage so
// emitted angles survive a parse/serialize cycle bit-for-bit.
double theta_from_degrees(double deg) {
  double t = deg * kPi / 180.0;
  for (int i = 0; i < 8 && t * 180.0 / kPi != deg; ++i)
    t = std::nextafter(t, t * 180.0 / kPi < deg ? HUGE_VAL : -HUGE_VAL);
  return t;
}

double checked_ratio(double num, double den, const char* what) {
  if (den <= 0.0)
    throw std::runtime_error(std::string("zero reference rate in ") + what);
  return num / den;
}

// Contrast of the polarizer-filtered x,y twofold rates with the y analyzer
// toggled, on a state already restricted to the conditioning sector.
double fringe_visibility(const QuantumState& sector, Spatial x, Spatial y,
                         int n_slots) {
  const double n2 = sector.norm2();
  if (n2 <= 0.0)
    throw std::invalid_argument("conditioning sector is empty");
  const ModeTransform pol_x = polarizer(x, jones_plus(), n_slots);
  double rate[2];
  int i = 0;
  for (const auto& pass : {jones_plus(), jones_minus()}) {
    QuantumState filtered = apply_transform(sector, pol_x);
    filtered = apply_transform(filtered, polarizer(y, pass, n_slots));
    rate[i++] = coincidence_probability(filtered, {x, y}) / n2;
  }
  const double hi = std::max(rate[0], rate[1]);
  const double lo = std::min(rate[0], rate[1]);
  if (hi + lo <= 0.0)
    throw std::runtime_error("no twofold coincidences on the fringe pair");
  return (hi - lo) / (hi + lo);
}

// Monotone 1-D solve for f(x) == target on [lo, hi]; exact endpoints are
// returned as-is so clean targets give clean parameters.
template <typename F>
double bisect_to(F&& f, double lo, double hi, double target,
                 const char* what) {
  double flo = f(lo);
  double fhi = f(hi);
  if (std::abs(flo - target) <= 1e-12) return lo;
  if (std::abs(fhi - target) <= 1e-12) return hi;
  const bool increasing = fhi >= flo;
  const double fmin = std::min(flo, fhi);
  const double fmax = std::max(flo, fhi);
  if (target < fmin - 1e-12 || target > fmax + 1e-12)
    throw std::invalid_argument(std::string("calibration target for ") + what +
                                " is outside the reachable range [" +
                                format_double(fmin) + ", " +
                                format_double(fmax) + "]");
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < target) == increasing)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

json point_to_json(const ThetaPoint& p) {
  return json{{"theta_deg", p.theta * 180.0 / kPi},
              {"spurious_prob", p.spurious_probability},
              {"ratio", p.ratio},
              {"cos2_fit_residual", p.cos2_residual},
              {"full_fraction", p.full_fraction}};
}

}  // namespace

QuantumState bsa_source(const CircuitConfig& cfg) {
  QuantumState s = spdc_state(cfg.spdc, cfg.effective_truncation());
  s = prepare_input(s, cfg.prep, cfg.n_slots);
  if (cfg.ancilla_dephasing > 0.0)
    s = apply_dephasing(s, Spatial::S3, cfg.ancilla_dephasing);
  return s;
}

QuantumState evolve_circuit(const CircuitConfig& cfg, QuantumState state) {
  const int ns = cfg.n_slots;
  if (cfg.rotator2 != 0.0)
    state = apply_transform(
        state, waveplate(WaveplateKind::ROTATOR, cfg.rotator2, Spatial::S2, ns));
  if (cfg.rotator4 != 0.0)
    state = apply_transform(
        state, waveplate(WaveplateKind::ROTATOR, cfg.rotator4, Spatial::S4, ns));
  state = apply_transform(state, pbs(upper_pbs(cfg), ns));
  state = apply_transform(state, pbs(lower_pbs(cfg), ns));
  if (cfg.qwp_c)
    state = apply_transform(
        state, waveplate(WaveplateKind::QWP, *cfg.qwp_c, Spatial::C, ns));
  if (cfg.qwp_d)
    state = apply_transform(
        state, waveplate(WaveplateKind::QWP, *cfg.qwp_d, Spatial::D, ns));
  return state;
}

BsaResult run_bsa(const CircuitConfig& cfg, const std::vector<InputKind>& inputs,
                  const SampleSpec& sample) {
  if (inputs.empty()) throw std::invalid_argument("no inputs requested");
  if (!sample.exact && sample.shots <= 0)
    throw std::invalid_argument("sampled runs need shots > 0");

  BsaResult result;
  result.sampled = !sample.exact;
  result.outcome_resolving = cfg.outcome_resolving;
  result.shots = sample.shots;
  result.seed = sample.seed;
  result.duration_s = sample.duration_s;

  double fidelity_sum = 0.0;
  int fidelity_rows = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    CircuitConfig c = cfg;
    c.prep.kind = inputs[i];

    // Every transform up to the analyzers preserves photon number, so the
    // four-photon-conditioned probabilities only need that sector.
    QuantumState src = photon_number_sector(bsa_source(c), 4);
    if (src.norm2() <= 0.0)
      throw std::invalid_argument(
          "source has no four-photon component (chi too small or zero)");
    QuantumState evolved = evolve_circuit(c, src);

    BsaRow row;
    row.input = input_label(inputs[i]);
    for (std::size_t j = 0; j < kSettings.size(); ++j)
      row.probabilities[j] =
          setting_probability(evolved, kSettings[j], c.n_slots);
    row.fourfold_probability = fourfold_probability(evolved, c.n_slots);

    const bool is_bell = inputs[i] != InputKind::Superposition;
    const double prob_sum = row.probabilities[0] + row.probabilities[1] +
                            row.probabilities[2] + row.probabilities[3];
    if (cfg.outcome_resolving)
      row.success_probability = outcome_resolved_success(evolved, c.n_slots);
    else if (is_bell)
      row.success_probability =
          row.probabilities[setting_index(identifying_setting(to_bell(inputs[i])))];
    else
      row.success_probability = prob_sum;  // no identifying setting to single out

    if (result.sampled) {
      const std::vector<double> weights(row.probabilities.begin(),
                                        row.probabilities.end());
      const uint64_t row_seed = sample.seed + static_cast<uint64_t>(i);
      const auto counts = sample_counts(
          weights, static_cast<double>(sample.shots), row_seed);
      std::copy(counts.begin(), counts.end(), row.counts.begin());
      if (is_bell) {
        row.fidelity = fidelity_from_counts(
            row.counts,
            static_cast<int>(setting_index(identifying_setting(to_bell(inputs[i])))));
        row.has_fidelity = true;
      }
    } else if (is_bell) {
      if (prob_sum <= 0.0)
        throw std::runtime_error("all setting probabilities vanished");
      row.fidelity.value =
          row.probabilities[setting_index(identifying_setting(to_bell(inputs[i])))] /
          prob_sum;
      row.fidelity.sigma = 0.0;
      row.has_fidelity = true;
    }
    if (row.has_fidelity) {
      fidelity_sum += row.fidelity.value;
      ++fidelity_rows;
    }
    result.rows.push_back(std::move(row));
  }
  result.average_fidelity =
      fidelity_rows > 0 ? fidelity_sum / fidelity_rows : 0.0;
  return result;
}

CountTable bsa_count_table(const BsaResult& r) {
  CountTable t;
  for (const auto& row : r.rows)
    for (std::size_t j = 0; j < kSettings.size(); ++j)
      t.rows.push_back(CountRow{row.input, setting_label(kSettings[j]),
                                row.counts[j], r.duration_s, r.seed});
  return t;
}

std::string to_json(const BsaResult& r) {
  json settings = json::array();
  for (const auto& s : kSettings) settings.push_back(setting_label(s));
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr{{"input", row.input},
            {"probabilities", row.probabilities},
            {"fourfold_probability", row.fourfold_probability},
            {"success_probability", row.success_probability}};
    if (r.sampled) jr["counts"] = row.counts;
    if (row.has_fidelity) {
      jr["fidelity"] = row.fidelity.value;
      jr["sigma"] = row.fidelity.sigma;
    }
    rows.push_back(std::move(jr));
  }
  json j{{"exact", !r.sampled},
         {"outcome_resolving", r.outcome_resolving},
         {"settings", settings},
         {"rows", rows},
         {"average_fidelity", r.average_fidelity}};
  if (r.sampled) {
    j["shots"] = r.shots;
    j["seed"] = r.seed;
    j["duration_s"] = r.duration_s;
  }
  return j.dump(2);
}

std::string to_csv(const BsaResult& r) {
  if (r.sampled) return to_csv(bsa_count_table(r));
  std::string out = "input,setting,probability\n";
  for (const auto& row : r.rows)
    for (std::size_t j = 0; j < kSettings.size(); ++j) {
      out += row.input;
      out += ',';
      out += setting_label(kSettings[j]);
      out += ',';
      out += format_double(row.probabilities[j]);
      out += '\n';
    }
  return out;
}

BsaResult bsa_result_from_json(const std::string& text) {
  const json j = json::parse(text);
  BsaResult r;
  r.sampled = !j.at("exact").get<bool>();
  r.outcome_resolving = j.at("outcome_resolving").get<bool>();
  for (const auto& jr : j.at("rows")) {
    BsaRow row;
    row.input = jr.at("input").get<std::string>();
    row.probabilities = jr.at("probabilities").get<std::array<double, 4>>();
    row.fourfold_probability = jr.at("fourfold_probability").get<double>();
    row.success_probability = jr.at("success_probability").get<double>();
    if (r.sampled)
      row.counts = jr.at("counts").get<std::array<long long, 4>>();
    if (jr.contains("fidelity")) {
      row.has_fidelity = true;
      row.fidelity.value = jr.at("fidelity").get<double>();
      row.fidelity.sigma = jr.at("sigma").get<double>();
    }
    r.rows.push_back(std::move(row));
  }
  r.average_fidelity = j.at("average_fidelity").get<double>();
  if (r.sampled) {
    r.shots = j.at("shots").get<long long>();
    r.seed = j.at("seed").get<uint64_t>();
    r.duration_s = j.at("duration_s").get<double>();
  }
  return r;
}

BsaResult bsa_result_from_csv(const std::string& text) {
  const auto rows = csv_rows(text, "input,setting,probability", 3);
  if (rows.size() % kSettings.size() != 0)
    throw std::invalid_argument(
        "probability table needs one row per setting for each input");
  BsaResult r;
  for (std::size_t i = 0; i < rows.size(); i += kSettings.size()) {
    BsaRow row;
    row.input = rows[i][0];
    for (std::size_t j = 0; j < kSettings.size(); ++j) {
      if (rows[i + j][0] != row.input ||
          rows[i + j][1] != setting_label(kSettings[j]))
        throw std::invalid_argument("probability table rows out of order");
      row.probabilities[j] = parse_double(rows[i + j][2]);
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

EncodingResult run_encoding(const CircuitConfig& cfg, cplx alpha, cplx beta) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-9)
    throw std::invalid_argument("qubit amplitudes must be normalized");
  const int trunc = cfg.effective_truncation();
  const int ns = cfg.n_slots;

  QuantumState anc =
      bell_pair(BellKind::PhiPlus, Spatial::S3, Spatial::S4, 0, trunc);
  if (cfg.ancilla_dephasing > 0.0)
    anc = apply_dephasing(anc, Spatial::S3, cfg.ancilla_dephasing);
  QuantumState with_h = create_photon(anc, Mode{Spatial::S1, Pol::H, 0});
  with_h *= alpha;
  QuantumState with_v = create_photon(anc, Mode{Spatial::S1, Pol::V, 0});
  with_v *= beta;
  with_h += with_v;
  QuantumState state = std::move(with_h);
  const double in_norm2 = state.norm2();

  state = apply_transform(state, pbs(upper_pbs(cfg), ns));
  if (cfg.qwp_c)
    state = apply_transform(
        state, waveplate(WaveplateKind::QWP, *cfg.qwp_c, Spatial::C, ns));

  QuantumState filtered =
      apply_transform(state, polarizer(Spatial::C, jones_plus(), ns));
  ProjectionPattern herald;
  herald.groups.emplace_back(rail_modes(Spatial::A, ns), 1);
  herald.groups.emplace_back(rail_modes(Spatial::C, ns), 1);
  const auto proj = project_occupation(filtered, herald);

  EncodingResult res;
  res.alpha = alpha;
  res.beta = beta;
  res.success_probability =
      proj.probability * filtered.norm2() / in_norm2;
  if (res.success_probability <= 0.0)
    throw std::runtime_error("encoding herald has zero probability");
  res.output = proj.state.normalized();

  QuantumState vac = QuantumState::vacuum(trunc);
  QuantumState t_h = create_photon(create_photon(vac, Mode{Spatial::A, Pol::H, 0}),
                                   Mode{Spatial::S4, Pol::H, 0});
  t_h *= alpha;
  QuantumState t_v = create_photon(create_photon(vac, Mode{Spatial::A, Pol::V, 0}),
                                   Mode{Spatial::S4, Pol::V, 0});
  t_v *= beta;
  t_h += t_v;
  QuantumState target = create_photon(t_h, Mode{Spatial::C, Pol::H, 0});
  QuantumState target_v = create_photon(t_h, Mode{Spatial::C, Pol::V, 0});
  target += target_v;
  target *= 1.0 / std::sqrt(2.0);
  target = target.normalized();

  res.fidelity = std::norm(inner_product(target, res.output));
  return res;
}

std::string to_json(const EncodingResult& r) {
  return json{{"alpha_re", r.alpha.real()},
              {"alpha_im", r.alpha.imag()},
              {"beta_re", r.beta.real()},
              {"beta_im", r.beta.imag()},
              {"fidelity", r.fidelity},
              {"success_probability", r.success_probability}}
      .dump(2);
}

std::string to_csv(const EncodingResult& r) {
  std::string out = "fidelity,success_probability\n";
  out += format_double(r.fidelity);
  out += ',';
  out += format_double(r.success_probability);
  out += '\n';
  return out;
}

EncodingResult encoding_from_json(const std::string& text) {
  const json j = json::parse(text);
  EncodingResult r;
  r.alpha = cplx{j.at("alpha_re").get<double>(), j.at("alpha_im").get<double>()};
  r.beta = cplx{j.at("beta_re").get<double>(), j.at("beta_im").get<double>()};
  r.fidelity = j.at("fidelity").get<double>();
  r.success_probability = j.at("success_probability").get<double>();
  return r;
}

EncodingResult encoding_from_csv(const std::string& text) {
  const auto rows = csv_rows(text, "fidelity,success_probability", 2);
  if (rows.size() != 1)
    throw std::invalid_argument("encoding CSV carries exactly one row");
  EncodingResult r;
  r.fidelity = parse_double(rows[0][0]);
  r.success_probability = parse_double(rows[0][1]);
  return r;
}

SuperpositionSummary summarize_superposition(const BsaResult& r) {
  if (r.rows.empty())
    throw std::invalid_argument("summary needs at least one result row");
  const BsaRow& row = r.rows.front();
  SuperpositionSummary s;
  s.probabilities = row.probabilities;
  const double phi_sum = row.probabilities[0] + row.probabilities[1];
  if (phi_sum > 0.0) {
    s.phi_plus_weight = row.probabilities[0] / phi_sum;
    s.phi_minus_weight = row.probabilities[1] / phi_sum;
  }
  s.sampled = r.sampled;
  s.counts = row.counts;
  s.seed = r.seed;
  return s;
}

std::string to_json(const SuperpositionSummary& s) {
  json j{{"probabilities", s.probabilities},
         {"phi_plus_weight", s.phi_plus_weight},
         {"phi_minus_weight", s.phi_minus_weight}};
  if (s.sampled) {
    j["counts"] = s.counts;
    j["seed"] = s.seed;
  }
  return j.dump(2);
}

SuperpositionSummary superposition_from_json(const std::string& text) {
  const json j = json::parse(text);
  SuperpositionSummary s;
  s.probabilities = j.at("probabilities").get<std::array<double, 4>>();
  s.phi_plus_weight = j.at("phi_plus_weight").get<double>();
  s.phi_minus_weight = j.at("phi_minus_weight").get<double>();
  if (j.contains("counts")) {
    s.sampled = true;
    s.counts = j.at("counts").get<std::array<long long, 4>>();
    s.seed = j.at("seed").get<uint64_t>();
  }
  return s;
}

std::vector<ThetaPoint> theta_scan(const CircuitConfig& cfg,
                                   const std::vector<double>& thetas) {
  if (cfg.spdc.order < 2)
    throw std::invalid_argument(
        "the suppression scan isolates a double emission; use an order-2 "
        "source");
  const int trunc = cfg.effective_truncation();
  const int ns = cfg.n_slots;
  const double v = cfg.spdc.backward_overlap;

  // Lone backward double emission, normalized; its fourfold rate is the
  // spurious background the rail-2 rotator is meant to cancel.
  QuantumState iso = pair_emission(
      pair_emission(QuantumState::vacuum(trunc), Spatial::S1, Spatial::S2, v),
      Spatial::S1, Spatial::S2, v);
  iso = prepare_input(iso.normalized(), cfg.prep, ns);

  // Full order-2 four-photon sector, split by emission origin: terms with all
  // four photons on the backward (1,2) or forward (3,4) rails are the
  // same-pass double emissions; the mixed terms are the signal.  Preparation
  // is rail-local, so the split commutes with it.
  QuantumState full4 = photon_number_sector(bsa_source(cfg), 4);
  QuantumState spur(full4.truncation(), full4.epsilon());
  for (const auto& [f, amp] : full4.terms()) {
    int backward = 0;
    for (const auto& [m, c] : f.entries())
      if (m.spatial == Spatial::S1 || m.spatial == Spatial::S2) backward += c;
    if (backward == 0 || backward == 4) spur.add(f, amp);
  }

  CircuitConfig at_zero = cfg;
  at_zero.rotator2 = 0.0;
  const double p0 = fourfold_probability(evolve_circuit(at_zero, iso), ns);
  if (p0 <= 0.0)
    throw std::runtime_error("spurious reference rate vanished at zero angle");

  std::vector<ThetaPoint> points;
  points.reserve(thetas.size());
  for (double theta : thetas) {
    CircuitConfig c = cfg;
    c.rotator2 = theta;

    ThetaPoint p;
    p.theta = theta;
    p.spurious_probability = fourfold_probability(evolve_circuit(c, iso), ns);
    p.ratio = p.spurious_probability / p0;
    const double cos2 = std::cos(2.0 * theta);
    p.cos2_residual = std::abs(p.ratio - cos2 * cos2);

    QuantumState full_ev = evolve_circuit(c, full4);
    QuantumState spur_ev = evolve_circuit(c, spur);
    ProjectionPattern pat;
    for (Spatial r : {Spatial::A, Spatial::B, Spatial::C, Spatial::D})
      pat.groups.emplace_back(rail_modes(r, ns), 1);
    const double kept_full =
        project_occupation(full_ev, pat).probability * full_ev.norm2();
    const double kept_spur =
        project_occupation(spur_ev, pat).probability * spur_ev.norm2();
    p.full_fraction = kept_full > 0.0 ? kept_spur / kept_full : 0.0;
    points.push_back(p);
  }
  return points;
}

std::string theta_scan_json(const CircuitConfig& cfg,
                            const std::vector<ThetaPoint>& points) {
  json pts = json::array();
  for (const auto& p : points) pts.push_back(point_to_json(p));
  return json{{"chi", cfg.spdc.chi},
              {"overlap", cfg.spdc.backward_overlap},
              {"rotator4_deg", cfg.rotator4 * 180.0 / kPi},
              {"points", pts}}
      .dump(2);
}

std::string theta_scan_csv(const std::vector<ThetaPoint>& points) {
  std::string out = "theta_deg,spurious_prob,cos2_fit_residual\n";
  for (const auto& p : points) {
    out += format_double(p.theta * 180.0 / kPi);
    out += ',';
    out += format_double(p.spurious_probability);
    out += ',';
    out += format_double(p.cos2_residual);
    out += '\n';
  }
  return out;
}

std::vector<ThetaPoint> theta_points_from_json(const std::string& text) {
  const json doc = json::parse(text);
  std::vector<ThetaPoint> points;
  for (const auto& jp : doc.at("points")) {
    ThetaPoint p;
    p.theta = theta_from_degrees(jp.at("theta_deg").get<double>());
    p.spurious_probability = jp.at("spurious_prob").get<double>();
    p.ratio = jp.at("ratio").get<double>();
    p.cos2_residual = jp.at("cos2_fit_residual").get<double>();
    p.full_fraction = jp.at("full_fraction").get<double>();
    points.push_back(p);
  }
  return points;
}

std::vector<ThetaPoint> theta_points_from_csv(const std::string& text) {
  const auto rows =
      csv_rows(text, "theta_deg,spurious_prob,cos2_fit_residual", 3);
  std::vector<ThetaPoint> points;
  points.reserve(rows.size());
  for (const auto& fields : rows) {
    ThetaPoint p;
    p.theta = theta_from_degrees(parse_double(fields[0]));
    p.spurious_probability = parse_double(fields[1]);
    p.cos2_residual = parse_double(fields[2]);
    points.push_back(p);
  }
  return points;
}

double pair_visibility(const CircuitConfig& cfg, Spatial x, Spatial y) {
  QuantumState evolved = evolve_circuit(cfg, bsa_source(cfg));
  return fringe_visibility(photon_number_sector(evolved, 2), x, y,
                           cfg.n_slots);
}

std::vector<OverlapPoint> overlap_scan(const CircuitConfig& cfg,
                                       const std::vector<double>& overlaps) {
  constexpr std::array<std::pair<Spatial, Spatial>, 4> pairs{
      std::pair{Spatial::A, Spatial::B}, std::pair{Spatial::C, Spatial::D},
      std::pair{Spatial::A, Spatial::D}, std::pair{Spatial::C, Spatial::B}};
  std::vector<OverlapPoint> points;
  points.reserve(overlaps.size());
  for (double v : overlaps) {
    CircuitConfig c = cfg;
    c.spdc.backward_overlap = v;
    OverlapPoint p;
    p.overlap = v;
    QuantumState sector =
        photon_number_sector(evolve_circuit(c, bsa_source(c)), 2);
    for (std::size_t i = 0; i < pairs.size(); ++i)
      p.visibility[i] =
          fringe_visibility(sector, pairs[i].first, pairs[i].second, c.n_slots);
    points.push_back(p);
  }
  return points;
}

double mirror_overlap(double displacement, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("wavepacket width must be > 0");
  const double r = displacement / sigma;
  return std::exp(-0.5 * r * r);
}

std::string overlap_scan_json(const CircuitConfig& cfg,
                              const std::vector<OverlapPoint>& points) {
  json pts = json::array();
  for (const auto& p : points) {
    json jp{{"overlap", p.overlap}};
    for (std::size_t i = 0; i < kOverlapPairLabels.size(); ++i)
      jp[std::string("vis_") + kOverlapPairLabels[i]] = p.visibility[i];
    pts.push_back(std::move(jp));
  }
  return json{{"chi", cfg.spdc.chi}, {"points", pts}}.dump(2);
}

std::string overlap_scan_csv(const std::vector<OverlapPoint>& points) {
  std::string out = "overlap";
  for (const char* label : kOverlapPairLabels) {
    out += ",vis_";
    out += label;
  }
  out += '\n';
  for (const auto& p : points) {
    out += format_double(p.overlap);
    for (double vis : p.visibility) {
      out += ',';
      out += format_double(vis);
    }
    out += '\n';
  }
  return out;
}

std::vector<OverlapPoint> overlap_points_from_json(const std::string& text) {
  const json doc = json::parse(text);
  std::vector<OverlapPoint> points;
  for (const auto& jp : doc.at("points")) {
    OverlapPoint p;
    p.overlap = jp.at("overlap").get<double>();
    for (std::size_t i = 0; i < kOverlapPairLabels.size(); ++i)
      p.visibility[i] =
          jp.at(std::string("vis_") + kOverlapPairLabels[i]).get<double>();
    points.push_back(p);
  }
  return points;
}

std::vector<OverlapPoint> overlap_points_from_csv(const std::string& text) {
  std::string header = "overlap";
  for (const char* label : kOverlapPairLabels) {
    header += ",vis_";
    header += label;
  }
  const auto rows = csv_rows(text, header, 1 + kOverlapPairLabels.size());
  std::vector<OverlapPoint> points;
  points.reserve(rows.size());
  for (const auto& fields : rows) {
    OverlapPoint p;
    p.overlap = parse_double(fields[0]);
    for (std::size_t i = 0; i < p.visibility.size(); ++i)
      p.visibility[i] = parse_double(fields[1 + i]);
    points.push_back(p);
  }
  return points;
}

double hv_port_correlation_visibility(const CircuitConfig& cfg) {
  QuantumState pair = bell_pair(BellKind::PhiPlus, Spatial::S1, Spatial::S2, 0,
                                std::max(4, cfg.effective_truncation()));
  if (cfg.prep.dephasing > 0.0)
    pair = apply_dephasing(pair, Spatial::S1, cfg.prep.dephasing);
  CircuitConfig straight = cfg;
  straight.rotator2 = 0.0;
  straight.rotator4 = 0.0;
  straight.qwp_c.reset();
  straight.qwp_d.reset();
  QuantumState ev = evolve_circuit(straight, pair);
  const double same = coincidence_probability(ev, {Spatial::A, Spatial::B}) +
                      coincidence_probability(ev, {Spatial::C, Spatial::D});
  const double diff = coincidence_probability(ev, {Spatial::A, Spatial::D}) +
                      coincidence_probability(ev, {Spatial::C, Spatial::B});
  if (same + diff <= 0.0)
    throw std::runtime_error("no port coincidences recorded");
  return (same - diff) / (same + diff);
}

double pair_diag_visibility(const CircuitConfig& cfg) {
  QuantumState pair = bell_pair(BellKind::PhiPlus, Spatial::S1, Spatial::S2, 0,
                                std::max(4, cfg.effective_truncation()));
  if (cfg.prep.dephasing > 0.0)
    pair = apply_dephasing(pair, Spatial::S1, cfg.prep.dephasing);
  return fringe_visibility(pair, Spatial::S1, Spatial::S2, cfg.n_slots);
}

CalibrationResult calibrate_imperfections(double target_hv, double target_diag,
                                          const CircuitConfig& base) {
  if (target_hv < 0.0 || target_hv > 1.0 || target_diag < 0.0 ||
      target_diag > 1.0)
    throw std::invalid_argument("visibility targets must lie in [0, 1]");
  if (base.spdc.chi <= 0.0)
    throw std::invalid_argument("calibration needs chi > 0");

  // The H/V port correlation only sees the PBS extinction, the direct +/-
  // pair fringe only the dephasing, so each solves independently; the gate
  // fringe then fixes the wavepacket overlap with both installed.
  const double eps = bisect_to(
      [&](double e) {
        CircuitConfig c = base;
        c.pbs_eps_t = e;
        c.pbs_eps_r = e;
        return hv_port_correlation_visibility(c);
      },
      0.0, 0.5, target_hv, "the H/V port correlation");

  const double deph = bisect_to(
      [&](double d) {
        CircuitConfig c = base;
        c.prep.dephasing = d;
        return pair_diag_visibility(c);
      },
      0.0, 1.0, target_diag, "the +/- pair visibility");

  // Each parameter is solved through its own mechanism with the other two
  // held ideal (the H/V solve never sees dephasing, the +/- solve never sees
  // the PBS); the overlap follows the same rule: an otherwise-ideal gate
  // fringe, whose contrast the wavepacket mismatch alone drags to the +/-
  // target.
  CircuitConfig gate = base;
  gate.pbs_eps_t = 0.0;
  gate.pbs_eps_r = 0.0;
  gate.prep.dephasing = 0.0;
  gate.ancilla_dephasing = 0.0;
  gate.spdc.order = 1;
  gate.truncation = 0;
  const double overlap = bisect_to(
      [&](double v) {
        CircuitConfig c = gate;
        c.spdc.backward_overlap = v;
        return pair_visibility(c, Spatial::A, Spatial::B);
      },
      0.0, 1.0, target_diag, "the gate fringe visibility");

  CalibrationResult res;
  res.backward_overlap = overlap;
  res.pbs_epsilon = eps;
  res.dephasing = deph;

  CircuitConfig final_cfg = base;
  final_cfg.pbs_eps_t = eps;
  final_cfg.pbs_eps_r = eps;
  final_cfg.prep.dephasing = deph;
  final_cfg.ancilla_dephasing = deph;
  final_cfg.spdc.backward_overlap = overlap;
  final_cfg.spdc.order = 2;
  final_cfg.truncation = 0;
  res.config = final_cfg;

  res.achieved_hv = hv_port_correlation_visibility(final_cfg);
  res.achieved_diag = pair_diag_visibility(final_cfg);
  res.achieved_overlap = pair_visibility(final_cfg, Spatial::A, Spatial::B);

  res.exact_average_fidelity =
      run_bsa(final_cfg,
              {InputKind::PhiPlus, InputKind::PhiMinus, InputKind::PsiPlus,
               InputKind::PsiMinus},
              SampleSpec{})
          .average_fidelity;
  return res;
}

std::string to_json(const CalibrationResult& r) {
  return json{{"backward_overlap", r.backward_overlap},
              {"pbs_epsilon", r.pbs_epsilon},
              {"dephasing", r.dephasing},
              {"achieved_hv", r.achieved_hv},
              {"achieved_diag", r.achieved_diag},
              {"achieved_overlap", r.achieved_overlap},
              {"chi", r.config.spdc.chi},
              {"order", r.config.spdc.order},
              {"exact_average_fidelity", r.exact_average_fidelity}}
      .dump(2);
}

std::string to_csv(const CalibrationResult& r) {
  const std::pair<const char*, double> rows[] = {
      {"backward_overlap", r.backward_overlap},
      {"pbs_epsilon", r.pbs_epsilon},
      {"dephasing", r.dephasing},
      {"achieved_hv", r.achieved_hv},
      {"achieved_diag", r.achieved_diag},
      {"achieved_overlap", r.achieved_overlap},
      {"exact_average_fidelity", r.exact_average_fidelity},
  };
  std::string out = "parameter,value\n";
  for (const auto& [key, value] : rows) {
    out += key;
    out += ',';
    // json formatting rather than to_chars: both are shortest round-trip,
    // but integral doubles must render the same way here and in the parser's
    // re-serialization ("1.0", not "1").
    out += json(value).dump();
    out += '\n';
  }
  return out;
}

namespace {

// Shared by the parsers: the degraded configuration the calibration itself
// would build from these scalars, on a default base.
CircuitConfig degraded_config(double chi, int order, const CalibrationResult& r) {
  CircuitConfig c;
  c.spdc.chi = chi;
  c.spdc.order = order;
  c.spdc.backward_overlap = r.backward_overlap;
  c.pbs_eps_t = r.pbs_epsilon;
  c.pbs_eps_r = r.pbs_epsilon;
  c.prep.dephasing = r.dephasing;
  c.ancilla_dephasing = r.dephasing;
  return c;
}

}  // namespace

CalibrationResult calibration_from_json(const std::string& text) {
  const json j = json::parse(text);
  CalibrationResult r;
  r.backward_overlap = j.at("backward_overlap").get<double>();
  r.pbs_epsilon = j.at("pbs_epsilon").get<double>();
  r.dephasing = j.at("dephasing").get<double>();
  r.achieved_hv = j.at("achieved_hv").get<double>();
  r.achieved_diag = j.at("achieved_diag").get<double>();
  r.achieved_overlap = j.at("achieved_overlap").get<double>();
  r.exact_average_fidelity = j.at("exact_average_fidelity").get<double>();
  r.config = degraded_config(j.at("chi").get<double>(),
                             j.at("order").get<int>(), r);
  return r;
}

CalibrationResult calibration_from_csv(const std::string& text) {
  const auto rows = csv_rows(text, "parameter,value", 2);
  CalibrationResult r;
  const std::pair<const char*, double*> slots[] = {
      {"backward_overlap", &r.backward_overlap},
      {"pbs_epsilon", &r.pbs_epsilon},
      {"dephasing", &r.dephasing},
      {"achieved_hv", &r.achieved_hv},
      {"achieved_diag", &r.achieved_diag},
      {"achieved_overlap", &r.achieved_overlap},
      {"exact_average_fidelity", &r.exact_average_fidelity},
  };
  unsigned seen = 0;
  for (const auto& fields : rows) {
    bool matched = false;
    for (std::size_t i = 0; i < std::size(slots); ++i)
      if (fields[0] == slots[i].first) {
        *slots[i].second = parse_double(fields[1]);
        seen |= 1u << i;
        matched = true;
        break;
      }
    if (!matched)
      throw std::invalid_argument("unknown calibration parameter: " +
                                  fields[0]);
  }
  if (seen != (1u << std::size(slots)) - 1)
    throw std::invalid_argument("calibration CSV needs all seven parameters");
  const SpdcSpec defaults;
  r.config = degraded_config(defaults.chi, defaults.order, r);
  return r;
}

}  // namespace bsa

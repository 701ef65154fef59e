// Command-line front end: one subcommand per experiment, a flat JSON config
// file for everything a flag can set (flags win), deterministic output for a
// fixed seed.  Exit codes: 0 success, 2 configuration error, 1 runtime error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bsasim/experiments.hpp"

namespace {

using json = nlohmann::ordered_json;

struct Options {
  std::string experiment;
  std::string input = "phi+";
  bool input_given = false;
  bool exact = false;
  long long shots = 0;
  uint64_t seed = 0;
  bool seed_given = false;
  std::string format = "json";
  bool format_given = false;
  std::string out;
  double duration_s = 1800.0;

  bsa::CircuitConfig circuit;

  // Qubit amplitudes for `encoding`, reused as the {phi+, phi-} coefficients
  // for `superposition`.
  double alpha_re = 1.0 / std::sqrt(2.0);
  double alpha_im = 0.0;
  double beta_re = 0.0;
  double beta_im = 1.0 / std::sqrt(2.0);

  std::vector<double> thetas_deg;
  std::vector<double> overlaps;

  double target_hv = 0.96;
  double target_diag = 0.94;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double deg2rad(double deg) { return deg * bsa::kPi / 180.0; }

void apply_config_file(const std::string& path, const std::string& subcommand,
                       Options& o) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " +
                      e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "experiment") {
        const auto kind = value.get<std::string>();
        if (kind != subcommand)
          throw ConfigError("config experiment '" + kind +
                            "' does not match subcommand '" + subcommand + "'");
      } else if (key == "input") {
        o.input = value.get<std::string>();
        o.input_given = true;
      } else if (key == "exact") {
        o.exact = value.get<bool>();
      } else if (key == "shots") {
        o.shots = value.get<long long>();
      } else if (key == "seed") {
        o.seed = value.get<uint64_t>();
        o.seed_given = true;
      } else if (key == "format") {
        o.format = value.get<std::string>();
        o.format_given = true;
      } else if (key == "out") {
        o.out = value.get<std::string>();
      } else if (key == "duration_s") {
        o.duration_s = value.get<double>();
      } else if (key == "v") {
        o.circuit.spdc.backward_overlap = value.get<double>();
      } else if (key == "chi") {
        o.circuit.spdc.chi = value.get<double>();
      } else if (key == "order") {
        o.circuit.spdc.order = value.get<int>();
      } else if (key == "epsilon") {
        o.circuit.pbs_eps_t = value.get<double>();
        o.circuit.pbs_eps_r = value.get<double>();
      } else if (key == "epsilon_t") {
        o.circuit.pbs_eps_t = value.get<double>();
      } else if (key == "epsilon_r") {
        o.circuit.pbs_eps_r = value.get<double>();
      } else if (key == "dephasing") {
        o.circuit.prep.dephasing = value.get<double>();
      } else if (key == "ancilla_dephasing") {
        o.circuit.ancilla_dephasing = value.get<double>();
      } else if (key == "rotator2_deg") {
        o.circuit.rotator2 = deg2rad(value.get<double>());
      } else if (key == "rotator4_deg") {
        o.circuit.rotator4 = deg2rad(value.get<double>());
      } else if (key == "qwp_c_deg") {
        o.circuit.qwp_c = deg2rad(value.get<double>());
      } else if (key == "qwp_d_deg") {
        o.circuit.qwp_d = deg2rad(value.get<double>());
      } else if (key == "hwp_offset_deg") {
        o.circuit.prep.hwp_angle = deg2rad(value.get<double>());
      } else if (key == "outcome_resolving") {
        o.circuit.outcome_resolving = value.get<bool>();
      } else if (key == "truncation") {
        o.circuit.truncation = value.get<int>();
      } else if (key == "alpha_re") {
        o.alpha_re = value.get<double>();
      } else if (key == "alpha_im") {
        o.alpha_im = value.get<double>();
      } else if (key == "beta_re") {
        o.beta_re = value.get<double>();
      } else if (key == "beta_im") {
        o.beta_im = value.get<double>();
      } else if (key == "thetas_deg") {
        o.thetas_deg = value.get<std::vector<double>>();
      } else if (key == "overlaps") {
        o.overlaps = value.get<std::vector<double>>();
      } else if (key == "target_hv") {
        o.target_hv = value.get<double>();
      } else if (key == "target_diag") {
        o.target_diag = value.get<double>();
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "' has the wrong type: " +
                        e.what());
    }
  }
}

void emit(const Options& o, const std::string& payload) {
  if (o.out.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + o.out);
  f << payload;
  if (!f) throw std::runtime_error("failed writing output file: " + o.out);
}

std::vector<bsa::InputKind> resolve_inputs(const Options& o) {
  if (!o.input_given)
    return {bsa::InputKind::PhiPlus, bsa::InputKind::PhiMinus,
            bsa::InputKind::PsiPlus, bsa::InputKind::PsiMinus};
  return {bsa::parse_input(o.input)};
}

bsa::SampleSpec make_sample(const Options& o) {
  bsa::SampleSpec s;
  s.exact = o.shots <= 0;
  s.shots = o.shots;
  s.seed = o.seed;
  s.duration_s = o.duration_s;
  return s;
}

int run_subcommand(const std::string& name, Options& o) {
  if (o.format != "json" && o.format != "csv")
    throw ConfigError("format must be json or csv, got: " + o.format);
  if (o.exact && o.shots > 0)
    throw ConfigError("--exact and --shots are mutually exclusive");

  const bsa::cplx alpha{o.alpha_re, o.alpha_im};
  const bsa::cplx beta{o.beta_re, o.beta_im};

  if (name == "bsa") {
    const auto result =
        bsa::run_bsa(o.circuit, resolve_inputs(o), make_sample(o));
    emit(o, o.format == "json" ? bsa::to_json(result) : bsa::to_csv(result));
    return 0;
  }

  if (name == "encoding") {
    const auto result = bsa::run_encoding(o.circuit, alpha, beta);
    emit(o, o.format == "json" ? bsa::to_json(result) : bsa::to_csv(result));
    return 0;
  }

  if (name == "theta-scan") {
    std::vector<double> thetas;
    if (o.thetas_deg.empty())
      for (int i = 0; i <= 18; ++i) thetas.push_back(deg2rad(2.5 * i));
    else
      for (double deg : o.thetas_deg) thetas.push_back(deg2rad(deg));
    const auto points = bsa::theta_scan(o.circuit, thetas);
    emit(o, o.format == "csv" ? bsa::theta_scan_csv(points)
                              : bsa::theta_scan_json(o.circuit, points));
    return 0;
  }

  if (name == "overlap-scan") {
    std::vector<double> grid = o.overlaps;
    if (grid.empty())
      for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);
    const auto points = bsa::overlap_scan(o.circuit, grid);
    emit(o, o.format == "csv" ? bsa::overlap_scan_csv(points)
                              : bsa::overlap_scan_json(o.circuit, points));
    return 0;
  }

  if (name == "superposition") {
    bsa::CircuitConfig cfg = o.circuit;
    cfg.prep.kind = bsa::InputKind::Superposition;
    cfg.prep.sup_phi_plus = alpha;
    cfg.prep.sup_phi_minus = beta;
    const auto result = bsa::run_bsa(cfg, {bsa::InputKind::Superposition},
                                     make_sample(o));
    emit(o, o.format == "json"
                ? bsa::to_json(bsa::summarize_superposition(result))
                : bsa::to_csv(result));
    return 0;
  }

  if (name == "calibrate") {
    const auto result =
        bsa::calibrate_imperfections(o.target_hv, o.target_diag, o.circuit);
    emit(o, o.format == "json" ? bsa::to_json(result) : bsa::to_csv(result));
    return 0;
  }

  throw std::logic_error("unhandled subcommand: " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Four-photon Bell-state analyzer simulator: truth tables, heralded "
      "encoding, double-emission suppression, overlap fringes, calibration."};
  app.require_subcommand(1);

  Options o;
  std::string config_path;
  double rotator2_deg = 45.0, rotator4_deg = 45.0;
  double epsilon = 0.0;

  const std::pair<const char*, const char*> kSubcommands[] = {
      {"bsa", "truth table of the four-input analyzer, exact or sampled"},
      {"encoding", "heralded encoding of an ancilla qubit"},
      {"theta-scan", "double-emission background vs rotator angle"},
      {"overlap-scan", "two-photon fringe visibility vs wavepacket overlap"},
      {"superposition", "analyzer response to a phi+/phi- superposition"},
      {"calibrate", "fit imperfections to measured pair visibilities"},
  };
  for (const auto& [name, help] : kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--input", o.input,
                    "input Bell state: phi+, phi-, psi+, psi-, superposition");
    sub->add_flag("--exact", o.exact, "exact probabilities, no sampling");
    sub->add_option("--shots", o.shots,
                    "expected total counts per input row (enables sampling)");
    sub->add_option("--seed", o.seed, "RNG seed (BSA_SEED env is the fallback)");
    sub->add_option("--config", config_path, "flat JSON config file");
    sub->add_option("--format", o.format, "output format: json or csv");
    sub->add_option("--out", o.out, "output path (default: stdout)");
    sub->add_option("--v", o.circuit.spdc.backward_overlap,
                    "backward/forward wavepacket overlap in [0,1]");
    sub->add_option("--epsilon", epsilon,
                    "PBS extinction (sets both polarizations)");
    sub->add_option("--dephasing", o.circuit.prep.dephasing,
                    "input-pair dephasing in [0,1]");
    sub->add_option("--chi", o.circuit.spdc.chi, "emission amplitude per pass");
    sub->add_option("--order", o.circuit.spdc.order,
                    "emissions kept per pass: 1 or 2");
    sub->add_option("--rotator2-deg", rotator2_deg, "rail-2 rotator angle");
    sub->add_option("--rotator4-deg", rotator4_deg, "rail-4 rotator angle");
    sub->add_flag("--outcome-resolving", o.circuit.outcome_resolving,
                  "replace fixed analyzers with +/- resolving detection");
    sub->add_option("--duration", o.duration_s,
                    "acquisition time metadata per table row, seconds");
    sub->add_option("--alpha-re", o.alpha_re, "Re qubit/superposition alpha");
    sub->add_option("--alpha-im", o.alpha_im, "Im qubit/superposition alpha");
    sub->add_option("--beta-re", o.beta_re, "Re qubit/superposition beta");
    sub->add_option("--beta-im", o.beta_im, "Im qubit/superposition beta");
    sub->add_option("--target-hv", o.target_hv,
                    "calibration target: H/V pair visibility");
    sub->add_option("--target-diag", o.target_diag,
                    "calibration target: +/- pair visibility");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* active = app.get_subcommands().front();
  const std::string name = active->get_name();

  try {
    // Flags were parsed straight into the option struct; the config file
    // fills everything the command line left untouched, so replay the flag
    // values on top afterwards.
    if (active->count("--config") > 0) {
      Options from_file = o;
      // Reset to defaults, apply file, then re-apply given flags.
      Options defaults;
      defaults.experiment = name;
      Options merged = defaults;
      apply_config_file(config_path, name, merged);
      auto given = [&](const char* flag) { return active->count(flag) > 0; };
      if (given("--input")) {
        merged.input = o.input;
        merged.input_given = true;
      }
      if (given("--exact")) merged.exact = o.exact;
      if (given("--shots")) merged.shots = o.shots;
      if (given("--seed")) {
        merged.seed = o.seed;
        merged.seed_given = true;
      }
      if (given("--format")) {
        merged.format = o.format;
        merged.format_given = true;
      }
      if (given("--out")) merged.out = o.out;
      if (given("--v"))
        merged.circuit.spdc.backward_overlap = o.circuit.spdc.backward_overlap;
      if (given("--dephasing"))
        merged.circuit.prep.dephasing = o.circuit.prep.dephasing;
      if (given("--chi")) merged.circuit.spdc.chi = o.circuit.spdc.chi;
      if (given("--order")) merged.circuit.spdc.order = o.circuit.spdc.order;
      if (given("--outcome-resolving"))
        merged.circuit.outcome_resolving = o.circuit.outcome_resolving;
      if (given("--duration")) merged.duration_s = o.duration_s;
      if (given("--alpha-re")) merged.alpha_re = o.alpha_re;
      if (given("--alpha-im")) merged.alpha_im = o.alpha_im;
      if (given("--beta-re")) merged.beta_re = o.beta_re;
      if (given("--beta-im")) merged.beta_im = o.beta_im;
      if (given("--target-hv")) merged.target_hv = o.target_hv;
      if (given("--target-diag")) merged.target_diag = o.target_diag;
      if (given("--epsilon")) {
        merged.circuit.pbs_eps_t = epsilon;
        merged.circuit.pbs_eps_r = epsilon;
      }
      if (given("--rotator2-deg")) merged.circuit.rotator2 = deg2rad(rotator2_deg);
      if (given("--rotator4-deg")) merged.circuit.rotator4 = deg2rad(rotator4_deg);
      o = merged;
    } else {
      if (active->count("--epsilon") > 0) {
        o.circuit.pbs_eps_t = epsilon;
        o.circuit.pbs_eps_r = epsilon;
      }
      if (active->count("--rotator2-deg") > 0)
        o.circuit.rotator2 = deg2rad(rotator2_deg);
      if (active->count("--rotator4-deg") > 0)
        o.circuit.rotator4 = deg2rad(rotator4_deg);
      o.seed_given = active->count("--seed") > 0;
      o.input_given = active->count("--input") > 0;
      o.format_given = active->count("--format") > 0;
    }

    if (!o.seed_given) {
      if (const char* env = std::getenv("BSA_SEED")) {
        try {
          o.seed = std::stoull(env);
        } catch (const std::exception&) {
          throw ConfigError(std::string("BSA_SEED is not an integer: ") + env);
        }
      }
    }

    // theta-scan needs the double-emission terms; default it rather than
    // erroring when the order was never mentioned.
    if (name == "theta-scan" && active->count("--order") == 0 &&
        o.circuit.spdc.order < 2)
      o.circuit.spdc.order = 2;

    // An explicit --format (or config key) wins; otherwise a .csv output
    // path selects the CSV rendering.
    if (!o.format_given && o.out.ends_with(".csv")) o.format = "csv";

    return run_subcommand(name, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bsasim/detection.hpp"
#include "bsasim/elements.hpp"
#include "bsasim/source.hpp"

namespace bsa {

inline constexpr double kPi = 3.14159265358979323846;

// Full analyzer layout: the double-pass source feeds rails 1..4, 45-degree
// rotators sit on rails 2 and 4, rails (1,3) meet the upper PBS into (a,c)
// and rails (2,4) meet the lower PBS into (b,d); optional quarter-wave
// compensators act on c and d, and the +/- analyzers downstream are part of
// detection.  Both PBSs share the extinction parameters.
struct CircuitConfig {
  SpdcSpec spdc;
  PreparationSpec prep;
  double rotator2 = kPi / 4.0;
  double rotator4 = kPi / 4.0;
  double pbs_eps_t = 0.0;
  double pbs_eps_r = 0.0;
  std::optional<double> qwp_c;  // retarder fast-axis angle; absent = no plate
  std::optional<double> qwp_d;
  double ancilla_dephasing = 0.0;  // rail-3 analogue of prep.dephasing
  bool outcome_resolving = false;
  int n_slots = kDefaultSlots;
  // 0 = derive from the source order (4, or 8 once double emissions exist).
  int truncation = 0;

  int effective_truncation() const {
    if (truncation > 0) return truncation;
    return spdc.order >= 2 ? 8 : 4;
  }
};

// Source state for the analyzer: double-pass emission, input preparation on
// the backward pair, matching dephasing on the ancilla rail.
QuantumState bsa_source(const CircuitConfig& cfg);

// Rotators, the two PBSs, and any compensators, in beam order.
QuantumState evolve_circuit(const CircuitConfig& cfg, QuantumState state);

struct SampleSpec {
  bool exact = true;
  long long shots = 0;         // expected total counts per input row
  uint64_t seed = 0;
  double duration_s = 1800.0;  // metadata carried into count tables
};

struct BsaRow {
  std::string input;
  std::array<double, 4> probabilities{};  // per setting, four-photon-conditioned
  std::array<long long, 4> counts{};      // all zero in exact mode
  bool has_fidelity = false;              // false for superposition inputs
  FidelityEstimate fidelity;
  double fourfold_probability = 0.0;
  double success_probability = 0.0;  // identifying setting, or the
                                     // outcome-resolved total
};

struct BsaResult {
  std::vector<BsaRow> rows;
  double average_fidelity = 0.0;  // over rows that have one
  bool sampled = false;
  bool outcome_resolving = false;
  long long shots = 0;
  uint64_t seed = 0;
  double duration_s = 0.0;
};

BsaResult run_bsa(const CircuitConfig& cfg, const std::vector<InputKind>& inputs,
                  const SampleSpec& sample);

CountTable bsa_count_table(const BsaResult& r);
std::string to_json(const BsaResult& r);
// Sampled results render as the count-table CSV; exact results as
// input,setting,probability rows.
std::string to_csv(const BsaResult& r);

// Inverses of the emitters above and below: parsing an emitted string
// reconstructs every serialized field bit-for-bit (fields a lossy CSV does
// not carry stay at their defaults), so re-serializing reproduces the text.
BsaResult bsa_result_from_json(const std::string& text);
// Exact-mode probability tables; sampled runs emit count tables, which
// `table_from_csv` parses.
BsaResult bsa_result_from_csv(const std::string& text);

// One-row digest of an analyzer run on a phi+/phi- superposition: the psi
// settings should stay dark while the phi settings split by the coefficient
// weights.
struct SuperpositionSummary {
  std::array<double, 4> probabilities{};  // per setting, as in BsaRow
  double phi_plus_weight = 0.0;           // probabilities[0] / (p0 + p1)
  double phi_minus_weight = 0.0;          // 0 when both phi settings are dark
  bool sampled = false;
  std::array<long long, 4> counts{};
  uint64_t seed = 0;
};

// Digest of the first row; throws if the result has none.
SuperpositionSummary summarize_superposition(const BsaResult& r);
std::string to_json(const SuperpositionSummary& s);
SuperpositionSummary superposition_from_json(const std::string& text);

struct EncodingResult {
  cplx alpha{};                      // qubit amplitudes the run encoded
  cplx beta{};
  double fidelity = 0.0;             // conditioned on the heralding pattern
  double success_probability = 0.0;  // one photon at a and c, c passing +
  QuantumState output;               // normalized heralded state
};

std::string to_json(const EncodingResult& r);
// Columns: fidelity,success_probability
std::string to_csv(const EncodingResult& r);
// Neither rendering carries `output` (and the CSV drops the amplitudes too);
// unserialized fields stay at their defaults.
EncodingResult encoding_from_json(const std::string& text);
EncodingResult encoding_from_csv(const std::string& text);

// Single-rail qubit alpha|H> + beta|V> on rail 1 plus the ancilla pair on
// (3,4), through the upper PBS, heralded on a + photon at c.
EncodingResult run_encoding(const CircuitConfig& cfg, cplx alpha, cplx beta);

struct ThetaPoint {
  double theta = 0.0;                 // rail-2 rotator angle, radians
  double spurious_probability = 0.0;  // isolated same-pass double emission
  double ratio = 0.0;                 // spurious_probability / value at 0
  double cos2_residual = 0.0;         // |ratio - cos^2(2 theta)|
  double full_fraction = 0.0;         // spurious share of the full fourfold
};

// Suppression scan of the same-pass double-emission background versus the
// rail-2 rotator angle.  Needs an order-2 source.
std::vector<ThetaPoint> theta_scan(const CircuitConfig& cfg,
                                   const std::vector<double>& thetas);

std::string theta_scan_json(const CircuitConfig& cfg,
                            const std::vector<ThetaPoint>& points);
// Columns: theta_deg,spurious_prob,cos2_fit_residual
std::string theta_scan_csv(const std::vector<ThetaPoint>& points);

// Parse the points back out of either rendering.  The CSV does not carry
// `ratio` or `full_fraction`, so those stay at their defaults.
std::vector<ThetaPoint> theta_points_from_json(const std::string& text);
std::vector<ThetaPoint> theta_points_from_csv(const std::string& text);

inline constexpr std::array<const char*, 4> kOverlapPairLabels{"ab", "cd", "ad",
                                                               "cb"};

struct OverlapPoint {
  double overlap = 0.0;                 // backward/forward wavepacket overlap v
  std::array<double, 4> visibility{};   // pair order kOverlapPairLabels
};

// Two-photon +/- fringe visibility between one upper and one lower output
// rail, conditioned on the two-photon sector, swept over the wavepacket
// overlap.
std::vector<OverlapPoint> overlap_scan(const CircuitConfig& cfg,
                                       const std::vector<double>& overlaps);

// One fringe: + analyzer fixed on x, the y analyzer toggled between + and -;
// contrast (max - min) / (max + min) of the x,y twofold coincidence rates.
double pair_visibility(const CircuitConfig& cfg, Spatial x, Spatial y);

// Wavepacket overlap of a mirror displaced by x from the zero-delay point,
// for a Gaussian wavepacket of width sigma.
double mirror_overlap(double displacement, double sigma);

std::string overlap_scan_json(const CircuitConfig& cfg,
                              const std::vector<OverlapPoint>& points);
std::string overlap_scan_csv(const std::vector<OverlapPoint>& points);

std::vector<OverlapPoint> overlap_points_from_json(const std::string& text);
std::vector<OverlapPoint> overlap_points_from_csv(const std::string& text);

// Direct two-photon diagnostics used by the calibration loop.
double hv_port_correlation_visibility(const CircuitConfig& cfg);
double pair_diag_visibility(const CircuitConfig& cfg);

struct CalibrationResult {
  double backward_overlap = 1.0;
  double pbs_epsilon = 0.0;
  double dephasing = 0.0;
  double achieved_hv = 1.0;       // simulated H/V port-correlation visibility
  double achieved_diag = 1.0;     // simulated direct +/- pair visibility
  double achieved_overlap = 1.0;  // simulated gate a,b fringe visibility
  CircuitConfig config;           // degraded order-2 configuration
  double exact_average_fidelity = 0.0;
};

// Finds source/analyzer imperfections reproducing the two measured pair
// visibilities: PBS extinction from the H/V target, dephasing from the +/-
// target, wavepacket overlap from an otherwise-ideal gate fringe dragged to
// the +/- target.  One bisection per parameter, each mechanism solved with
// the other two held ideal, matched to 1e-3 in its observable.
CalibrationResult calibrate_imperfections(double target_hv, double target_diag,
                                          const CircuitConfig& base);

std::string to_json(const CalibrationResult& r);
// parameter,value rows, one per solved or achieved scalar.
std::string to_csv(const CalibrationResult& r);
// Restores the serialized scalars bit-for-bit and rebuilds `config` from them
// on top of a default base, the same way the calibration itself does.  The
// CSV does not carry chi or the emission order, so those stay at the source
// defaults.
CalibrationResult calibration_from_json(const std::string& text);
CalibrationResult calibration_from_csv(const std::string& text);

}  // namespace bsa

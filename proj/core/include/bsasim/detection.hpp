#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bsasim/quantum_state.hpp"
#include "bsasim/source.hpp"

namespace bsa {

enum class PolSign { Plus, Minus };

// Analyzer configuration behind the output rails: rails a and b carry the
// variable +/- polarizers, rails c and d are fixed at +.
struct Setting {
  PolSign a = PolSign::Plus;
  PolSign b = PolSign::Plus;
};

inline constexpr std::array<Setting, 4> kSettings{
    Setting{PolSign::Plus, PolSign::Plus},
    Setting{PolSign::Minus, PolSign::Plus},
    Setting{PolSign::Plus, PolSign::Minus},
    Setting{PolSign::Minus, PolSign::Minus}};

std::string setting_label(const Setting& s);  // "++", "-+", "+-", "--"
Setting parse_setting(const std::string& label);

// The analyzer setting whose fourfold clicks identify the given input state.
Setting identifying_setting(BellKind k);

// Restrictions of a state to a fixed total photon number (unnormalized).
QuantumState photon_number_sector(const QuantumState& s, int n);

// P(exactly one photon on each of a, b, c, d | four-photon sector), counting
// photons per spatial rail regardless of polarization or temporal slot.
double fourfold_probability(const QuantumState& s,
                            int n_slots = kDefaultSlots);

// Same, but with +/- polarizers inserted first: variable ones on a and b from
// `setting`, fixed + on c and d.  Probabilities over the four settings sum to
// the polarizer-free fourfold probability only after the 1/4 analyzer loss at
// c and d; they are reported conditioned on the four-photon sector.
double setting_probability(const QuantumState& s, const Setting& setting,
                           int n_slots = kDefaultSlots);

// Success probability when the +/- analyzers are replaced by
// polarization-resolving detection in the +/- basis on all four rails: the
// summed probability of all 16 one-photon-per-rail outcomes, conditioned on
// the four-photon sector.
double outcome_resolved_success(const QuantumState& s,
                                int n_slots = kDefaultSlots);

// Summed squared amplitude of the terms holding at least one photon on every
// listed rail.  Raw (not normalized); no polarizer is applied here — compose
// with `polarizer` upstream and divide by the conditioning norm as needed.
double coincidence_probability(const QuantumState& s,
                               const std::vector<Spatial>& rails);

// |amplitude|^2 per basis state, in map order.  Not normalized.
std::map<FockState, double> amplitude_weights(const QuantumState& s);

// Detectors cannot resolve the temporal slot: collapse a slot-resolved
// weight map by erasing slot labels (every mode mapped to slot 0) and summing.
std::map<FockState, double> trace_temporal(
    const std::map<FockState, double>& weights);

// Deterministic Poisson counts: counts[i] ~ Poisson(expected_total * p[i])
// where p is `weights` normalized.  A fixed seed fixes the table bit-for-bit.
std::vector<long long> sample_counts(const std::vector<double>& weights,
                                     double expected_total, uint64_t seed);

struct FidelityEstimate {
  double value = 0.0;
  double sigma = 0.0;
};

// F = correct/total over one input row of the truth table, with the binomial
// standard error sqrt(F(1-F)/total).
FidelityEstimate fidelity_from_counts(const std::array<long long, 4>& counts,
                                      int correct_index);

struct CountRow {
  std::string input;
  std::string setting;
  long long counts = 0;
  double duration_s = 0.0;
  uint64_t seed = 0;
};

struct CountTable {
  std::vector<CountRow> rows;
};

// CSV with header input,setting,counts,duration_s,seed.  Doubles are written
// with shortest round-trip formatting, so parse(to_csv(t)) reproduces t
// bit-for-bit; same for the JSON form.
std::string to_csv(const CountTable& t);
CountTable table_from_csv(const std::string& text);
std::string to_json(const CountTable& t);
CountTable table_from_json(const std::string& text);

}  // namespace bsa

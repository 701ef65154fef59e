#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsasim/fock_state.hpp"

namespace bsa {

using cplx = std::complex<double>;

class TruncationError : public std::runtime_error {
 public:
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Sparse superposition over Fock states.  Sub-normalized states are legal:
// after a projection the squared norm is the survival probability.  Photon
// number is capped by `truncation`; amplitudes below `epsilon` are pruned.
class QuantumState {
 public:
  static constexpr double kDefaultEpsilon = 1e-14;

  explicit QuantumState(int truncation = 4, double epsilon = kDefaultEpsilon);

  static QuantumState vacuum(int truncation = 4);

  int truncation() const { return truncation_; }
  double epsilon() const { return epsilon_; }
  void set_truncation(int t);

  const std::map<FockState, cplx>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  cplx amplitude(const FockState& f) const;
  void add(const FockState& f, cplx amp);

  double norm2() const;
  double norm() const;

  QuantumState& operator*=(cplx s);
  QuantumState& operator+=(const QuantumState& other);

  // Scales to unit norm; throws on the zero state.
  QuantumState normalized() const;

  // Fixes the global phase so the first (canonically ordered) nonzero
  // amplitude is real and positive.  Only meaningful for comparisons.
  QuantumState canonicalized() const;

  void prune();

 private:
  std::map<FockState, cplx> terms_;
  int truncation_;
  double epsilon_;
};

// a^dagger(mode): adds one photon, amplitude factor sqrt(n+1).  The result is
// deliberately not renormalized.  Throws TruncationError past the cap.
QuantumState create_photon(const QuantumState& s, const Mode& m);

// <s1|s2>, conjugate-linear in the first argument.
cplx inner_product(const QuantumState& s1, const QuantumState& s2);

// A projection pattern: disjoint groups of modes, each with a required total
// photon count.  Modes outside every group are unconstrained.
struct ProjectionPattern {
  std::vector<std::pair<std::vector<Mode>, int>> groups;
};

struct ProjectionResult {
  QuantumState state;   // renormalized to the input norm
  double probability;   // kept norm^2 relative to the input norm^2
};

ProjectionResult project_occupation(const QuantumState& s,
                                    const ProjectionPattern& pattern);

// All (pol, slot) modes of one spatial rail.
std::vector<Mode> rail_modes(Spatial s, int n_slots = kDefaultSlots);

// JSON round-trip.  Terms are emitted in canonical order;
// deserialize(serialize(s)) reproduces s exactly.
std::string to_json(const QuantumState& s);
QuantumState state_from_json(const std::string& text);

}  // namespace bsa

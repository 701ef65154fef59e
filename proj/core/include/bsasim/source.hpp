#pragma once

#include <complex>

#include "bsasim/mode_transform.hpp"

namespace bsa {

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

const char* bell_label(BellKind k);
BellKind parse_bell(const std::string& label);

// (|HH> +- |VV>)/sqrt2 or (|HV> +- |VH>)/sqrt2 on the given rails, slot 0
// unless stated otherwise.
QuantumState bell_pair(BellKind kind, Spatial s1, Spatial s2, int slot = 0,
                       int truncation = 4);

// Double-pass downconversion source.  The forward pass emits phi+ pairs into
// rails (3,4) at temporal slot 0; the reflected pass emits phi+ pairs into
// rails (1,2) whose photons sit in the wavepacket
//   v |slot 0> + sqrt(1 - v^2) |slot 1>,
// so `backward_overlap` v is the amplitude overlap with the forward photons.
// Each pass is expanded to `order` pair emissions and the passes multiply,
// so order 1 already contains the chi^2 one-pair-per-pass term and order 2
// adds the same-pass double emissions (up to 8 photons).
struct SpdcSpec {
  double chi = 0.1;
  double backward_overlap = 1.0;
  int order = 1;
};

QuantumState spdc_state(const SpdcSpec& spec, int truncation = 4);

// One application of the pair creator (a+_H a+_H' + a+_V a+_V')/sqrt2 on the
// rail pair (s1, s2), each photon in the wavepacket v|slot0> +
// sqrt(1-v^2)|slot1>.  Building block of `spdc_state`, exposed so isolated
// emission terms (e.g. a lone double emission) can be constructed directly.
QuantumState pair_emission(const QuantumState& s, Spatial s1, Spatial s2,
                           double overlap);

enum class InputKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus, Superposition };

const char* input_label(InputKind k);
InputKind parse_input(const std::string& label);

// Preparation acting on the (1,2) pair: a local polarization unitary plus a
// phase tilt selects the Bell state (or a phi+/phi- superposition), an
// optional waveplate offset models preparation misalignment, and `dephasing`
// splits rail-1 V amplitude into temporal slot 1 so the +/- two-photon
// visibility drops to 1 - dephasing while H/V correlations are untouched.
struct PreparationSpec {
  InputKind kind = InputKind::PhiPlus;
  // Coefficients over {phi+, phi-} when kind == Superposition.  Must be
  // normalized with Re(c_plus * conj(c_minus)) == 0; that is exactly the
  // family reachable by a phase tilt on one rail, and it includes equal-weight
  // combinations with a real or imaginary relative phase such as (1, i)/sqrt2.
  cplx sup_phi_plus{1.0, 0.0};
  cplx sup_phi_minus{0.0, 0.0};
  double hwp_angle = 0.0;  // radians, rail-1 waveplate offset; 0 = aligned
  double dephasing = 0.0;  // in [0, 1]
};

QuantumState prepare_input(const QuantumState& base, const PreparationSpec& p,
                           int n_slots = kDefaultSlots);

// Coherently splits the rail's V amplitude between slot 0 and slot 1:
// slot0 -> (1-d) slot0 + sqrt(d(2-d)) slot1 (a rotation, so it stays
// unitary).  Exposed so the ancilla pair can be degraded the same way.
QuantumState apply_dephasing(const QuantumState& s, Spatial rail, double d);

}  // namespace bsa

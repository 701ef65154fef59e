#pragma once

#include <Eigen/Dense>

#include "bsasim/mode_transform.hpp"

namespace bsa {

// Parity-check basis of a polarizing beam splitter.  HV transmits H and
// reflects V; DIAG is the same device conjugated into the +/- basis on all
// four ports.
enum class PbsBasis { HV, DIAG };

struct PbsSpec {
  Spatial in1 = Spatial::S1;
  Spatial in2 = Spatial::S3;
  Spatial out1 = Spatial::A;
  Spatial out2 = Spatial::C;
  PbsBasis basis = PbsBasis::HV;
  // Extinctions: eps_r is the wrong-port fraction of the transmitted
  // polarization (H leaking into the reflected port), eps_t the wrong-port
  // fraction of the reflected polarization (V leaking into transmission).
  double eps_t = 0.0;
  double eps_r = 0.0;
};

// Wrong-port amplitudes enter with a 90-degree phase (sqrt(eps) -> i*sqrt(eps))
// so the leakage model stays exactly unitary on the four ports; photons keep
// their polarization when misrouted.
ModeTransform pbs(const PbsSpec& spec, int n_slots = kDefaultSlots);

enum class WaveplateKind { ROTATOR, HWP, QWP };

// ROTATOR(theta): |H> -> cos|H> + sin|V>, |V> -> -sin|H> + cos|V>.
// HWP(alpha):     |H> -> cos2a|H> + sin2a|V>, |V> -> sin2a|H> - cos2a|V>.
// QWP(alpha):     quarter-wave retarder with fast axis at alpha.
// Angles in radians.  Applied identically to every temporal slot.
ModeTransform waveplate(WaveplateKind kind, double angle, Spatial rail,
                        int n_slots = kDefaultSlots);

// Non-unitary projection onto `pass` (a normalized Jones vector); the output
// squared norm is the pass probability.
ModeTransform polarizer(Spatial rail, const Eigen::Vector2cd& pass,
                        int n_slots = kDefaultSlots);

// Self-inverse H/V <-> +/- relabeling on one rail.
ModeTransform change_pol_basis(Spatial rail, int n_slots = kDefaultSlots);

Eigen::Vector2cd jones_h();
Eigen::Vector2cd jones_v();
Eigen::Vector2cd jones_plus();
Eigen::Vector2cd jones_minus();

}  // namespace bsa

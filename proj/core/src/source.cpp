#include "bsasim/source.hpp"

#include <cmath>
#include <stdexcept>

#include "bsasim/elements.hpp"

namespace bsa {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// a^dagger(rail, pol) acting in the wavepacket v|slot0> + sqrt(1-v^2)|slot1>.
QuantumState create_in_wavepacket(const QuantumState& s, Spatial rail, Pol pol,
                                  double v) {
  QuantumState out = create_photon(s, Mode{rail, pol, 0});
  out *= v;
  const double w = std::sqrt(std::max(0.0, 1.0 - v * v));
  if (w > 0.0) {
    QuantumState tail = create_photon(s, Mode{rail, pol, 1});
    tail *= w;
    out += tail;
  }
  return out;
}

// Pair creator (a+_H a+_H + a+_V a+_V)/sqrt2 on (s1, s2); backward pairs get
// the wavepacket, forward pairs sit in slot 0.
QuantumState apply_pair_creator(const QuantumState& s, Spatial s1, Spatial s2,
                                double v) {
  QuantumState hh = create_in_wavepacket(
      create_in_wavepacket(s, s1, Pol::H, v), s2, Pol::H, v);
  QuantumState vv = create_in_wavepacket(
      create_in_wavepacket(s, s1, Pol::V, v), s2, Pol::V, v);
  hh += vv;
  hh *= kInvSqrt2;
  return hh;
}

// sum_{k=0..order} chi^k/k! P^k applied to `base`.
QuantumState expand_pass(const QuantumState& base, Spatial s1, Spatial s2,
                         double chi, double v, int order) {
  QuantumState total = base;
  QuantumState term = base;
  for (int k = 1; k <= order; ++k) {
    term = apply_pair_creator(term, s1, s2, v);
    term *= chi / static_cast<double>(k);
    total += term;
  }
  return total;
}

}  // namespace

QuantumState pair_emission(const QuantumState& s, Spatial s1, Spatial s2,
                           double overlap) {
  if (overlap < 0.0 || overlap > 1.0)
    throw std::invalid_argument("overlap must lie in [0, 1]");
  return apply_pair_creator(s, s1, s2, overlap);
}

namespace {

Eigen::Matrix2cd kind_jones(InputKind kind) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  switch (kind) {
    case InputKind::PhiPlus:
      break;
    case InputKind::PhiMinus:
      m(1, 1) = -1.0;
      break;
    case InputKind::PsiPlus:
      m << 0.0, 1.0, 1.0, 0.0;
      break;
    case InputKind::PsiMinus:
      // H -> -V, V -> H; turns phi+ into (|HV> - |VH>)/sqrt2.
      m << 0.0, 1.0, -1.0, 0.0;
      break;
    case InputKind::Superposition:
      throw std::logic_error("superposition handled separately");
  }
  return m;
}

ModeTransform rail1_jones(const Eigen::Matrix2cd& j, int n_slots) {
  std::vector<Mode> domain;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n_slots, 2 * n_slots);
  for (int t = 0; t < n_slots; ++t) {
    domain.push_back(Mode{Spatial::S1, Pol::H, static_cast<uint8_t>(t)});
    domain.push_back(Mode{Spatial::S1, Pol::V, static_cast<uint8_t>(t)});
    m.block<2, 2>(2 * t, 2 * t) = j;
  }
  return ModeTransform(std::move(domain), std::move(m));
}

}  // namespace

const char* bell_label(BellKind k) {
  switch (k) {
    case BellKind::PhiPlus:
      return "phi+";
    case BellKind::PhiMinus:
      return "phi-";
    case BellKind::PsiPlus:
      return "psi+";
    case BellKind::PsiMinus:
      return "psi-";
  }
  throw std::logic_error("bad BellKind");
}

BellKind parse_bell(const std::string& label) {
  if (label == "phi+") return BellKind::PhiPlus;
  if (label == "phi-") return BellKind::PhiMinus;
  if (label == "psi+") return BellKind::PsiPlus;
  if (label == "psi-") return BellKind::PsiMinus;
  throw std::invalid_argument("unknown Bell state label: " + label);
}

QuantumState bell_pair(BellKind kind, Spatial s1, Spatial s2, int slot,
                       int truncation) {
  const auto t = static_cast<uint8_t>(slot);
  QuantumState vac = QuantumState::vacuum(truncation);
  const bool phi = kind == BellKind::PhiPlus || kind == BellKind::PhiMinus;
  const bool plus = kind == BellKind::PhiPlus || kind == BellKind::PsiPlus;
  QuantumState first = create_photon(
      create_photon(vac, Mode{s1, Pol::H, t}),
      Mode{s2, phi ? Pol::H : Pol::V, t});
  QuantumState second = create_photon(
      create_photon(vac, Mode{s1, Pol::V, t}),
      Mode{s2, phi ? Pol::V : Pol::H, t});
  second *= plus ? 1.0 : -1.0;
  first += second;
  first *= kInvSqrt2;
  return first;
}

QuantumState spdc_state(const SpdcSpec& spec, int truncation) {
  if (spec.chi < 0.0) throw std::invalid_argument("chi must be >= 0");
  if (spec.backward_overlap < 0.0 || spec.backward_overlap > 1.0)
    throw std::invalid_argument("backward_overlap must lie in [0, 1]");
  if (spec.order < 1 || spec.order > 2)
    throw std::invalid_argument("source order must be 1 or 2");
  if (spec.order == 2 && truncation < 8)
    throw std::invalid_argument(
        "order-2 source emits up to 8 photons; raise truncation to >= 8");

  QuantumState vac = QuantumState::vacuum(truncation);
  QuantumState forward = expand_pass(vac, Spatial::S3, Spatial::S4, spec.chi,
                                     1.0, spec.order);
  QuantumState full = expand_pass(forward, Spatial::S1, Spatial::S2, spec.chi,
                                  spec.backward_overlap, spec.order);
  return full.normalized();
}

const char* input_label(InputKind k) {
  switch (k) {
    case InputKind::PhiPlus:
      return "phi+";
    case InputKind::PhiMinus:
      return "phi-";
    case InputKind::PsiPlus:
      return "psi+";
    case InputKind::PsiMinus:
      return "psi-";
    case InputKind::Superposition:
      return "superposition";
  }
  throw std::logic_error("bad InputKind");
}

InputKind parse_input(const std::string& label) {
  if (label == "phi+") return InputKind::PhiPlus;
  if (label == "phi-") return InputKind::PhiMinus;
  if (label == "psi+") return InputKind::PsiPlus;
  if (label == "psi-") return InputKind::PsiMinus;
  if (label == "superposition") return InputKind::Superposition;
  throw std::invalid_argument("unknown input label: " + label);
}

QuantumState prepare_input(const QuantumState& base, const PreparationSpec& p,
                           int n_slots) {
  if (p.dephasing < 0.0 || p.dephasing > 1.0)
    throw std::invalid_argument("dephasing must lie in [0, 1]");

  QuantumState out = base;
  if (p.kind == InputKind::Superposition) {
    const cplx a = p.sup_phi_plus;
    const cplx b = p.sup_phi_minus;
    const double n2 = std::norm(a) + std::norm(b);
    if (std::abs(n2 - 1.0) > 1e-9)
      throw std::invalid_argument(
          "superposition coefficients must be normalized");
    if (std::abs((a * std::conj(b)).real()) > 1e-9)
      throw std::invalid_argument(
          "superposition coefficients must satisfy Re(c+ conj(c-)) == 0; "
          "only those mixes are reachable by a preparation phase tilt");
    // diag(1, e^{i delta}) on rail 1 with e^{i delta} = (a-b)/(a+b), times
    // the unit-modulus global factor (a+b), sends phi+ to a phi+ + b phi-.
    const cplx tilt = (a - b) / (a + b);
    Eigen::Matrix2cd j = Eigen::Matrix2cd::Identity();
    j(1, 1) = tilt;
    out = apply_transform(out, rail1_jones(j, n_slots));
    out *= a + b;
  } else {
    const Eigen::Matrix2cd j = kind_jones(p.kind);
    if (!j.isIdentity(0.0)) out = apply_transform(out, rail1_jones(j, n_slots));
  }

  if (p.hwp_angle != 0.0)
    out = apply_transform(
        out,
        waveplate(WaveplateKind::ROTATOR, p.hwp_angle, Spatial::S1, n_slots));
  if (p.dephasing > 0.0) out = apply_dephasing(out, Spatial::S1, p.dephasing);
  return out;
}

QuantumState apply_dephasing(const QuantumState& s, Spatial rail, double d) {
  if (d < 0.0 || d > 1.0)
    throw std::invalid_argument("dephasing must lie in [0, 1]");
  if (d == 0.0) return s;
  const double mu = 1.0 - d;
  const double nu = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  std::vector<Mode> domain{Mode{rail, Pol::V, 0}, Mode{rail, Pol::V, 1}};
  Eigen::MatrixXcd m(2, 2);
  m << mu, -nu, nu, mu;
  return apply_transform(s, ModeTransform(std::move(domain), std::move(m)));
}

}  // namespace bsa

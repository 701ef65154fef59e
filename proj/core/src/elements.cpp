#include "bsasim/elements.hpp"

#include <cmath>
#include <stdexcept>

namespace bsa {

namespace {

constexpr cplx kI{0.0, 1.0};

// Modes of the given rails for one slot, H block then V block:
// [r0.H, r1.H, ..., r0.V, r1.V, ...]
std::vector<Mode> slot_modes(const std::vector<Spatial>& rails, int slot) {
  std::vector<Mode> out;
  for (Pol p : {Pol::H, Pol::V}) {
    for (Spatial r : rails) out.push_back(Mode{r, p, std::uint8_t(slot)});
  }
  return out;
}

// Replicates a per-slot block across n_slots (no slot mixing).
ModeTransform per_slot(const std::vector<Spatial>& rails,
                       const Eigen::MatrixXcd& block, int n_slots) {
  if (n_slots < 1) throw std::invalid_argument("need at least one temporal slot");
  const int b = int(block.rows());
  std::vector<Mode> domain;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(b * n_slots, b * n_slots);
  for (int t = 0; t < n_slots; ++t) {
    auto modes = slot_modes(rails, t);
    domain.insert(domain.end(), modes.begin(), modes.end());
    m.block(b * t, b * t, b, b) = block;
  }
  return ModeTransform(std::move(domain), std::move(m));
}

Eigen::MatrixXcd pbs_hv_block(double eps_t, double eps_r) {
  if (eps_t < 0 || eps_t > 1 || eps_r < 0 || eps_r > 1)
    throw std::invalid_argument("pbs extinction must lie in [0, 1]");
  // Mode order within a slot: in1H in2H out1H out2H | in1V in2V out1V out2V.
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(8, 8);
  const double tr = std::sqrt(1.0 - eps_r), lr = std::sqrt(eps_r);
  const double tv = std::sqrt(1.0 - eps_t), lv = std::sqrt(eps_t);
  // H transmits: inK -> outK, leakage to the opposite port.
  m(2, 0) = tr; m(3, 0) = kI * lr;   // in1H -> out1H (+ i out2H)
  m(3, 1) = tr; m(2, 1) = kI * lr;   // in2H -> out2H (+ i out1H)
  m(0, 2) = tr; m(1, 2) = kI * lr;   // mirror geometry: out1H -> in1H
  m(1, 3) = tr; m(0, 3) = kI * lr;
  // V reflects: in1 -> out2, in2 -> out1, leakage to the transmitted port.
  m(7, 4) = tv; m(6, 4) = kI * lv;   // in1V -> out2V (+ i out1V)
  m(6, 5) = tv; m(7, 5) = kI * lv;   // in2V -> out1V (+ i out2V)
  m(5, 6) = tv; m(4, 6) = kI * lv;   // out1V -> in2V
  m(4, 7) = tv; m(5, 7) = kI * lv;   // out2V -> in1V
  return m;
}

Eigen::Matrix2cd basis_change_block() {
  Eigen::Matrix2cd b;
  b << 1.0, 1.0, 1.0, -1.0;
  return b / std::sqrt(2.0);
}

}  // namespace

ModeTransform pbs(const PbsSpec& spec, int n_slots) {
  std::vector<Spatial> rails{spec.in1, spec.in2, spec.out1, spec.out2};
  Eigen::MatrixXcd block = pbs_hv_block(spec.eps_t, spec.eps_r);
  if (spec.basis == PbsBasis::DIAG) {
    // Conjugate the H/V action by the +/- basis change on all four ports.
    Eigen::MatrixXcd b2 = basis_change_block();
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(8, 8);
    // Mode order is H block (4 rails) then V block, so the per-port basis
    // change couples index k (H) with k+4 (V).
    for (int k = 0; k < 4; ++k) {
      big(k, k) = b2(0, 0);
      big(k, k + 4) = b2(0, 1);
      big(k + 4, k) = b2(1, 0);
      big(k + 4, k + 4) = b2(1, 1);
    }
    block = big * block * big;
  }
  return per_slot(rails, block, n_slots);
}

ModeTransform waveplate(WaveplateKind kind, double angle, Spatial rail,
                        int n_slots) {
  Eigen::Matrix2cd j;
  const double c = std::cos(angle), s = std::sin(angle);
  switch (kind) {
    case WaveplateKind::ROTATOR:
      j << c, -s, s, c;
      break;
    case WaveplateKind::HWP: {
      const double c2 = std::cos(2 * angle), s2 = std::sin(2 * angle);
      j << c2, s2, s2, -c2;
      break;
    }
    case WaveplateKind::QWP: {
      Eigen::Matrix2cd rot, ret;
      rot << c, -s, s, c;
      ret << 1.0, 0.0, 0.0, kI;
      j = rot * ret * rot.transpose();
      break;
    }
  }
  return per_slot({rail}, j, n_slots);
}

ModeTransform polarizer(Spatial rail, const Eigen::Vector2cd& pass, int n_slots) {
  if (std::abs(pass.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("polarizer pass state must be normalized");
  Eigen::Matrix2cd j = pass * pass.adjoint();
  return per_slot({rail}, j, n_slots);
}

ModeTransform change_pol_basis(Spatial rail, int n_slots) {
  return per_slot({rail}, basis_change_block(), n_slots);
}

Eigen::Vector2cd jones_h() { return Eigen::Vector2cd(1.0, 0.0); }
Eigen::Vector2cd jones_v() { return Eigen::Vector2cd(0.0, 1.0); }
Eigen::Vector2cd jones_plus() {
  return Eigen::Vector2cd(1.0, 1.0) / std::sqrt(2.0);
}
Eigen::Vector2cd jones_minus() {
  return Eigen::Vector2cd(1.0, -1.0) / std::sqrt(2.0);
}

}  // namespace bsa

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bsasim/elements.hpp"

using namespace bsa;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kHalfAmp{1.0 / std::sqrt(2.0), 0.0};

QuantumState one_photon(Spatial rail, Pol pol, int slot = 0) {
  return create_photon(QuantumState::vacuum(4), Mode{rail, pol, std::uint8_t(slot)});
}

cplx amp(const QuantumState& s, std::initializer_list<FockState::Entry> entries) {
  return s.amplitude(FockState(entries));
}

}  // namespace

TEST_CASE("hv pbs transmits H and reflects V") {
  const ModeTransform t = pbs(PbsSpec{});
  CHECK(amp(apply_transform(one_photon(Spatial::S1, Pol::H), t),
            {{Mode{Spatial::A, Pol::H, 0}, 1}}).real() == doctest::Approx(1.0));
  CHECK(amp(apply_transform(one_photon(Spatial::S3, Pol::H), t),
            {{Mode{Spatial::C, Pol::H, 0}, 1}}).real() == doctest::Approx(1.0));
  CHECK(amp(apply_transform(one_photon(Spatial::S1, Pol::V), t),
            {{Mode{Spatial::C, Pol::V, 0}, 1}}).real() == doctest::Approx(1.0));
  CHECK(amp(apply_transform(one_photon(Spatial::S3, Pol::V), t),
            {{Mode{Spatial::A, Pol::V, 0}, 1}}).real() == doctest::Approx(1.0));
}

TEST_CASE("pbs sorts even parity into one rail and odd parity into two") {
  const ModeTransform t = pbs(PbsSpec{});
  QuantumState even = create_photon(one_photon(Spatial::S1, Pol::H),
                                    Mode{Spatial::S3, Pol::V, 0});
  QuantumState out = apply_transform(even, t);
  CHECK(std::abs(amp(out, {{Mode{Spatial::A, Pol::H, 0}, 1},
                           {Mode{Spatial::A, Pol::V, 0}, 1}})) == doctest::Approx(1.0));

  QuantumState odd = create_photon(one_photon(Spatial::S1, Pol::H),
                                   Mode{Spatial::S3, Pol::H, 0});
  out = apply_transform(odd, t);
  CHECK(std::abs(amp(out, {{Mode{Spatial::A, Pol::H, 0}, 1},
                           {Mode{Spatial::C, Pol::H, 0}, 1}})) == doctest::Approx(1.0));
}

TEST_CASE("imperfect pbs stays unitary and preserves norm") {
  PbsSpec spec;
  spec.eps_t = 0.07;
  spec.eps_r = 0.13;
  const ModeTransform t = pbs(spec);
  REQUIRE(t.is_unitary());
  const Eigen::MatrixXcd gram =
      t.matrix.adjoint() * t.matrix -
      Eigen::MatrixXcd::Identity(t.matrix.rows(), t.matrix.cols());
  CHECK(gram.norm() < 1e-12);

  QuantumState s(4);
  s.add(FockState({{Mode{Spatial::S1, Pol::H, 0}, 2},
                   {Mode{Spatial::S3, Pol::V, 1}, 1}}),
        cplx{0.6, 0.0});
  s.add(FockState({{Mode{Spatial::S1, Pol::V, 0}, 1}}), cplx{0.0, 0.8});
  CHECK(apply_transform(s, t).norm2() == doctest::Approx(s.norm2()));
}

TEST_CASE("pbs leakage carries probability eps with a 90 degree phase") {
  PbsSpec spec;
  spec.eps_r = 0.09;
  const ModeTransform t = pbs(spec);
  const QuantumState out = apply_transform(one_photon(Spatial::S1, Pol::H), t);
  const cplx straight = amp(out, {{Mode{Spatial::A, Pol::H, 0}, 1}});
  const cplx leaked = amp(out, {{Mode{Spatial::C, Pol::H, 0}, 1}});
  CHECK(straight.real() == doctest::Approx(std::sqrt(0.91)));
  CHECK(straight.imag() == doctest::Approx(0.0));
  CHECK(leaked.real() == doctest::Approx(0.0));
  CHECK(leaked.imag() == doctest::Approx(std::sqrt(0.09)));
  // eps_t leaks the reflected polarization symmetrically.
  PbsSpec spec2;
  spec2.eps_t = 0.25;
  const QuantumState out2 =
      apply_transform(one_photon(Spatial::S1, Pol::V), pbs(spec2));
  CHECK(std::norm(amp(out2, {{Mode{Spatial::A, Pol::V, 0}, 1}})) ==
        doctest::Approx(0.25));
  CHECK(std::norm(amp(out2, {{Mode{Spatial::C, Pol::V, 0}, 1}})) ==
        doctest::Approx(0.75));
}

TEST_CASE("diag pbs routes the +/- basis the way hv routes h/v") {
  PbsSpec spec;
  spec.basis = PbsBasis::DIAG;
  const ModeTransform t = pbs(spec);

  QuantumState plus(4);
  plus.add(FockState({{Mode{Spatial::S1, Pol::H, 0}, 1}}), kHalfAmp);
  plus.add(FockState({{Mode{Spatial::S1, Pol::V, 0}, 1}}), kHalfAmp);
  QuantumState out = apply_transform(plus, t);
  // + transmits to the first output rail, still +.
  CHECK(amp(out, {{Mode{Spatial::A, Pol::H, 0}, 1}}).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(amp(out, {{Mode{Spatial::A, Pol::V, 0}, 1}}).real() == doctest::Approx(1.0 / std::sqrt(2.0)));

  QuantumState minus(4);
  minus.add(FockState({{Mode{Spatial::S1, Pol::H, 0}, 1}}), kHalfAmp);
  minus.add(FockState({{Mode{Spatial::S1, Pol::V, 0}, 1}}), cplx{-1.0 / std::sqrt(2.0), 0.0});
  out = apply_transform(minus, t);
  // - reflects to the second output rail.
  CHECK(amp(out, {{Mode{Spatial::C, Pol::H, 0}, 1}}).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(amp(out, {{Mode{Spatial::C, Pol::V, 0}, 1}}).real() == doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("rotator tilts H toward V by the plate angle") {
  const double theta = 0.3;
  const ModeTransform r = waveplate(WaveplateKind::ROTATOR, theta, Spatial::S2);
  const QuantumState out = apply_transform(one_photon(Spatial::S2, Pol::H), r);
  CHECK(amp(out, {{Mode{Spatial::S2, Pol::H, 0}, 1}}).real() == doctest::Approx(std::cos(theta)));
  CHECK(amp(out, {{Mode{Spatial::S2, Pol::V, 0}, 1}}).real() == doctest::Approx(std::sin(theta)));
  const QuantumState outv = apply_transform(one_photon(Spatial::S2, Pol::V), r);
  CHECK(amp(outv, {{Mode{Spatial::S2, Pol::H, 0}, 1}}).real() == doctest::Approx(-std::sin(theta)));
}

TEST_CASE("composed rotators add their angles") {
  const ModeTransform ab = compose(waveplate(WaveplateKind::ROTATOR, 0.5, Spatial::S1),
                                   waveplate(WaveplateKind::ROTATOR, 0.2, Spatial::S1));
  const ModeTransform direct = waveplate(WaveplateKind::ROTATOR, 0.7, Spatial::S1);
  const QuantumState probe = one_photon(Spatial::S1, Pol::H);
  const QuantumState a = apply_transform(probe, ab);
  const QuantumState b = apply_transform(probe, direct);
  CHECK(std::abs(inner_product(a, b) - cplx{1.0, 0.0}) < 1e-12);
}

TEST_CASE("half-wave plate at 22.5 degrees maps H to +") {
  const ModeTransform h = waveplate(WaveplateKind::HWP, kPi / 8.0, Spatial::S1);
  const QuantumState out = apply_transform(one_photon(Spatial::S1, Pol::H), h);
  CHECK(amp(out, {{Mode{Spatial::S1, Pol::H, 0}, 1}}).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(amp(out, {{Mode{Spatial::S1, Pol::V, 0}, 1}}).real() == doctest::Approx(1.0 / std::sqrt(2.0)));

  const ModeTransform h0 = waveplate(WaveplateKind::HWP, 0.0, Spatial::S1);
  const QuantumState outv = apply_transform(one_photon(Spatial::S1, Pol::V), h0);
  CHECK(amp(outv, {{Mode{Spatial::S1, Pol::V, 0}, 1}}).real() == doctest::Approx(-1.0));
}

TEST_CASE("quarter-wave plate retards the slow axis by i") {
  const ModeTransform q0 = waveplate(WaveplateKind::QWP, 0.0, Spatial::C);
  const QuantumState outv = apply_transform(one_photon(Spatial::C, Pol::V), q0);
  CHECK(amp(outv, {{Mode{Spatial::C, Pol::V, 0}, 1}}).imag() == doctest::Approx(1.0));

  const ModeTransform q45 = waveplate(WaveplateKind::QWP, kPi / 4.0, Spatial::C);
  const QuantumState outh = apply_transform(one_photon(Spatial::C, Pol::H), q45);
  const cplx hh = amp(outh, {{Mode{Spatial::C, Pol::H, 0}, 1}});
  const cplx hv = amp(outh, {{Mode{Spatial::C, Pol::V, 0}, 1}});
  CHECK(hh.real() == doctest::Approx(0.5));
  CHECK(hh.imag() == doctest::Approx(0.5));
  CHECK(hv.real() == doctest::Approx(0.5));
  CHECK(hv.imag() == doctest::Approx(-0.5));
}

TEST_CASE("polarizer projects with the pass probability in the norm") {
  const ModeTransform p = polarizer(Spatial::A, jones_plus());
  const QuantumState out = apply_transform(one_photon(Spatial::A, Pol::H), p);
  CHECK(out.norm2() == doctest::Approx(0.5));
  CHECK(amp(out, {{Mode{Spatial::A, Pol::H, 0}, 1}}).real() == doctest::Approx(0.5));
  CHECK(amp(out, {{Mode{Spatial::A, Pol::V, 0}, 1}}).real() == doctest::Approx(0.5));

  // A photon already in the pass state sails through.
  QuantumState plus(4);
  plus.add(FockState({{Mode{Spatial::A, Pol::H, 0}, 1}}), kHalfAmp);
  plus.add(FockState({{Mode{Spatial::A, Pol::V, 0}, 1}}), kHalfAmp);
  CHECK(apply_transform(plus, p).norm2() == doctest::Approx(1.0));
  // And the orthogonal state is blocked.
  const QuantumState blocked =
      apply_transform(plus, polarizer(Spatial::A, jones_minus()));
  CHECK(blocked.norm2() == doctest::Approx(0.0));

  CHECK_THROWS_AS(polarizer(Spatial::A, Eigen::Vector2cd(1.0, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("polarization basis change is self-inverse") {
  const ModeTransform bc = change_pol_basis(Spatial::B);
  QuantumState probe(4);
  probe.add(FockState({{Mode{Spatial::B, Pol::H, 0}, 1}}), cplx{0.8, 0.0});
  probe.add(FockState({{Mode{Spatial::B, Pol::V, 1}, 1}}), cplx{0.0, 0.6});
  const QuantumState twice = apply_transform(apply_transform(probe, bc), bc);
  CHECK(std::abs(inner_product(twice, probe) - cplx{1.0, 0.0}) < 1e-12);
}

TEST_CASE("per-slot elements act on every slot without mixing them") {
  const ModeTransform t = pbs(PbsSpec{});
  const QuantumState out = apply_transform(one_photon(Spatial::S1, Pol::V, 1), t);
  CHECK(std::abs(amp(out, {{Mode{Spatial::C, Pol::V, 1}, 1}})) == doctest::Approx(1.0));
  CHECK(out.term_count() == 1);
}

TEST_CASE("modes outside the transform domain are untouched") {
  const ModeTransform t = pbs(PbsSpec{});  // acts on rails 1 and 3
  const QuantumState probe = one_photon(Spatial::S2, Pol::H);
  const QuantumState out = apply_transform(probe, t);
  CHECK(std::abs(inner_product(out, probe) - cplx{1.0, 0.0}) < 1e-12);
}

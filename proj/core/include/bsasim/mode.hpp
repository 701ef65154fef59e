#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bsa {

// Spatial labels of the interferometer: 1..4 are source/input rails,
// a..d are the analyzer output rails.
enum class Spatial : std::uint8_t { S1 = 0, S2, S3, S4, A, B, C, D };

enum class Pol : std::uint8_t { H = 0, V = 1 };

inline constexpr int kSpatialCount = 8;

// Number of temporal slots carried through the default pipelines.  Slot 0 is
// the reference (forward-pass) slot; slot 1 absorbs delayed / walked-off
// amplitude.
inline constexpr int kDefaultSlots = 2;

// A bosonic mode: spatial rail x polarization x temporal slot.
struct Mode {
  Spatial spatial = Spatial::S1;
  Pol pol = Pol::H;
  std::uint8_t temporal = 0;

  friend auto operator<=>(const Mode&, const Mode&) = default;
};

inline char spatial_label(Spatial s) {
  static constexpr char tab[] = {'1', '2', '3', '4', 'a', 'b', 'c', 'd'};
  return tab[static_cast<int>(s)];
}

inline Spatial parse_spatial(char c) {
  switch (c) {
    case '1': return Spatial::S1;
    case '2': return Spatial::S2;
    case '3': return Spatial::S3;
    case '4': return Spatial::S4;
    case 'a': return Spatial::A;
    case 'b': return Spatial::B;
    case 'c': return Spatial::C;
    case 'd': return Spatial::D;
    default: throw std::invalid_argument(std::string("unknown spatial label: ") + c);
  }
}

inline char pol_label(Pol p) { return p == Pol::H ? 'H' : 'V'; }

inline Pol parse_pol(char c) {
  if (c == 'H') return Pol::H;
  if (c == 'V') return Pol::V;
  throw std::invalid_argument(std::string("unknown polarization label: ") + c);
}

inline std::string to_string(const Mode& m) {
  std::string s;
  s += spatial_label(m.spatial);
  s += pol_label(m.pol);
  s += ':';
  s += std::to_string(int(m.temporal));
  return s;
}

}  // namespace bsa

#pragma once

#include <compare>
#include <initializer_list>
#include <utility>
#include <vector>

#include "bsasim/mode.hpp"

namespace bsa {

// Occupation-number basis state.  Stored as a sorted (mode, count) list with
// no zero entries, so equal states compare equal and the map ordering used
// for serialization is canonical.
class FockState {
 public:
  using Entry = std::pair<Mode, int>;

  FockState() = default;
  FockState(std::initializer_list<Entry> entries);
  explicit FockState(std::vector<Entry> entries);

  static FockState vacuum() { return FockState(); }

  int count(const Mode& m) const;
  int total_photons() const;

  // Occupation with one extra photon in m; second = the new count.
  std::pair<FockState, int> with_added(const Mode& m) const;

  // Occupation with the given modes removed entirely.
  FockState without_modes(const std::vector<Mode>& modes) const;

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  friend auto operator<=>(const FockState&, const FockState&) = default;

 private:
  void normalize();
  std::vector<Entry> entries_;
};

}  // namespace bsa

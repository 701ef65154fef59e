#include "bsasim/fock_state.hpp"

#include <algorithm>
#include <stdexcept>

namespace bsa {

FockState::FockState(std::initializer_list<Entry> entries)
    : entries_(entries) {
  normalize();
}

FockState::FockState(std::vector<Entry> entries) : entries_(std::move(entries)) {
  normalize();
}

void FockState::normalize() {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  std::vector<Entry> merged;
  merged.reserve(entries_.size());
  for (const Entry& e : entries_) {
    if (e.second < 0) throw std::invalid_argument("negative occupation");
    if (e.second == 0) continue;
    if (!merged.empty() && merged.back().first == e.first) {
      merged.back().second += e.second;
    } else {
      merged.push_back(e);
    }
  }
  entries_ = std::move(merged);
}

int FockState::count(const Mode& m) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), m,
      [](const Entry& e, const Mode& mm) { return e.first < mm; });
  if (it != entries_.end() && it->first == m) return it->second;
  return 0;
}

int FockState::total_photons() const {
  int n = 0;
  for (const Entry& e : entries_) n += e.second;
  return n;
}

std::pair<FockState, int> FockState::with_added(const Mode& m) const {
  FockState out = *this;
  auto it = std::lower_bound(
      out.entries_.begin(), out.entries_.end(), m,
      [](const Entry& e, const Mode& mm) { return e.first < mm; });
  if (it != out.entries_.end() && it->first == m) {
    ++it->second;
    return {std::move(out), it->second};
  }
  out.entries_.insert(it, Entry{m, 1});
  return {std::move(out), 1};
}

FockState FockState::without_modes(const std::vector<Mode>& modes) const {
  std::vector<Entry> kept;
  kept.reserve(entries_.size());
  for (const Entry& e : entries_) {
    if (std::find(modes.begin(), modes.end(), e.first) == modes.end())
      kept.push_back(e);
  }
  FockState out;
  out.entries_ = std::move(kept);
  return out;
}

}  // namespace bsa

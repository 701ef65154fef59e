#include "bsasim/quantum_state.hpp"

#include <cmath>
#include "json.hpp"

namespace bsa {

using json = nlohmann::ordered_json;

QuantumState::QuantumState(int truncation, double epsilon)
    : truncation_(truncation), epsilon_(epsilon) {
  if (truncation < 0) throw std::invalid_argument("truncation must be >= 0");
}

QuantumState QuantumState::vacuum(int truncation) {
  QuantumState s(truncation);
  s.add(FockState::vacuum(), 1.0);
  return s;
}

void QuantumState::set_truncation(int t) {
  if (t < 0) throw std::invalid_argument("truncation must be >= 0");
  for (const auto& [f, a] : terms_) {
    if (f.total_photons() > t)
      throw TruncationError("existing term exceeds requested truncation");
  }
  truncation_ = t;
}

cplx QuantumState::amplitude(const FockState& f) const {
  auto it = terms_.find(f);
  return it == terms_.end() ? cplx(0.0) : it->second;
}

void QuantumState::add(const FockState& f, cplx amp) {
  if (f.total_photons() > truncation_)
    throw TruncationError("term exceeds photon-number truncation");
  auto [it, inserted] = terms_.try_emplace(f, amp);
  if (!inserted) {
    it->second += amp;
    if (std::abs(it->second) < epsilon_) terms_.erase(it);
    return;
  }
  if (std::abs(it->second) < epsilon_) terms_.erase(it);
}

double QuantumState::norm2() const {
  double n = 0.0;
  for (const auto& [f, a] : terms_) n += std::norm(a);
  return n;
}

double QuantumState::norm() const { return std::sqrt(norm2()); }

QuantumState& QuantumState::operator*=(cplx s) {
  if (std::abs(s) == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [f, a] : terms_) a *= s;
  prune();
  return *this;
}

QuantumState& QuantumState::operator+=(const QuantumState& other) {
  for (const auto& [f, a] : other.terms_) add(f, a);
  return *this;
}

QuantumState QuantumState::normalized() const {
  double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero state");
  QuantumState out = *this;
  out *= cplx(1.0 / n);
  return out;
}

QuantumState QuantumState::canonicalized() const {
  for (const auto& [f, a] : terms_) {
    double mag = std::abs(a);
    if (mag >= epsilon_) {
      QuantumState out = *this;
      out *= std::conj(a) / mag;
      return out;
    }
  }
  return *this;
}

void QuantumState::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < epsilon_)
      it = terms_.erase(it);
    else
      ++it;
  }
}

QuantumState create_photon(const QuantumState& s, const Mode& m) {
  QuantumState out(s.truncation(), s.epsilon());
  for (const auto& [f, a] : s.terms()) {
    auto [g, n_new] = f.with_added(m);
    if (g.total_photons() > s.truncation())
      throw TruncationError("create_photon exceeds truncation");
    out.add(g, a * std::sqrt(double(n_new)));
  }
  return out;
}

cplx inner_product(const QuantumState& s1, const QuantumState& s2) {
  const auto& a = s1.terms();
  const auto& b = s2.terms();
  cplx acc = 0.0;
  if (a.size() <= b.size()) {
    for (const auto& [f, amp] : a) {
      auto it = b.find(f);
      if (it != b.end()) acc += std::conj(amp) * it->second;
    }
  } else {
    for (const auto& [f, amp] : b) {
      auto it = a.find(f);
      if (it != a.end()) acc += std::conj(s1.amplitude(f)) * amp;
    }
  }
  return acc;
}

namespace {

bool matches(const FockState& f, const ProjectionPattern& pattern) {
  for (const auto& [modes, required] : pattern.groups) {
    int total = 0;
    for (const Mode& m : modes) total += f.count(m);
    if (total != required) return false;
  }
  return true;
}

}  // namespace

ProjectionResult project_occupation(const QuantumState& s,
                                    const ProjectionPattern& pattern) {
  QuantumState kept(s.truncation(), s.epsilon());
  for (const auto& [f, a] : s.terms()) {
    if (matches(f, pattern)) kept.add(f, a);
  }
  double in2 = s.norm2();
  double kept2 = kept.norm2();
  if (in2 == 0.0 || kept2 == 0.0) {
    return {QuantumState(s.truncation(), s.epsilon()), 0.0};
  }
  // Renormalize the surviving branch back to the input norm so chained
  // projection probabilities multiply.
  kept *= cplx(std::sqrt(in2 / kept2));
  return {std::move(kept), kept2 / in2};
}

std::vector<Mode> rail_modes(Spatial s, int n_slots) {
  std::vector<Mode> out;
  out.reserve(2 * n_slots);
  for (Pol p : {Pol::H, Pol::V}) {
    for (int t = 0; t < n_slots; ++t) {
      out.push_back(Mode{s, p, std::uint8_t(t)});
    }
  }
  return out;
}

std::string to_json(const QuantumState& s) {
  json root;
  root["truncation"] = s.truncation();
  json terms = json::array();
  for (const auto& [f, a] : s.terms()) {
    json occ = json::array();
    for (const auto& [m, n] : f.entries()) {
      occ.push_back({std::string(1, spatial_label(m.spatial)),
                     std::string(1, pol_label(m.pol)), int(m.temporal), n});
    }
    terms.push_back({{"occ", occ}, {"re", a.real()}, {"im", a.imag()}});
  }
  root["terms"] = std::move(terms);
  return root.dump(2);
}

QuantumState state_from_json(const std::string& text) {
  json root = json::parse(text);
  QuantumState s(root.at("truncation").get<int>());
  for (const auto& term : root.at("terms")) {
    std::vector<FockState::Entry> entries;
    for (const auto& e : term.at("occ")) {
      Mode m;
      m.spatial = parse_spatial(e.at(0).get<std::string>().at(0));
      m.pol = parse_pol(e.at(1).get<std::string>().at(0));
      m.temporal = std::uint8_t(e.at(2).get<int>());
      entries.emplace_back(m, e.at(3).get<int>());
    }
    s.add(FockState(std::move(entries)),
          cplx(term.at("re").get<double>(), term.at("im").get<double>()));
  }
  return s;
}

}  // namespace bsa

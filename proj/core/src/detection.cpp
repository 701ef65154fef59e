#include "bsasim/detection.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "bsasim/elements.hpp"

namespace bsa {

namespace {

using json = nlohmann::ordered_json;

char sign_char(PolSign s) { return s == PolSign::Plus ? '+' : '-'; }

PolSign parse_sign(char c) {
  if (c == '+') return PolSign::Plus;
  if (c == '-') return PolSign::Minus;
  throw std::invalid_argument(std::string("bad polarizer sign: ") + c);
}

ProjectionPattern fourfold_pattern(int n_slots) {
  ProjectionPattern pat;
  for (Spatial r : {Spatial::A, Spatial::B, Spatial::C, Spatial::D})
    pat.groups.emplace_back(rail_modes(r, n_slots), 1);
  return pat;
}

Eigen::Vector2cd sign_jones(PolSign s) {
  return s == PolSign::Plus ? jones_plus() : jones_minus();
}

QuantumState apply_output_polarizers(const QuantumState& s, PolSign a,
                                     PolSign b, PolSign c, PolSign d,
                                     int n_slots) {
  QuantumState out = apply_transform(s, polarizer(Spatial::A, sign_jones(a), n_slots));
  out = apply_transform(out, polarizer(Spatial::B, sign_jones(b), n_slots));
  out = apply_transform(out, polarizer(Spatial::C, sign_jones(c), n_slots));
  out = apply_transform(out, polarizer(Spatial::D, sign_jones(d), n_slots));
  return out;
}

double sector_norm2_or_throw(const QuantumState& sector) {
  const double n2 = sector.norm2();
  if (n2 <= 0.0)
    throw std::invalid_argument("state has no four-photon component");
  return n2;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, p);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    throw std::invalid_argument("bad floating-point field: " + text);
  return v;
}

long long parse_ll(const std::string& text) {
  long long v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    throw std::invalid_argument("bad integer field: " + text);
  return v;
}

uint64_t parse_u64(const std::string& text) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    throw std::invalid_argument("bad unsigned field: " + text);
  return v;
}

// 53-bit uniform in [0, 1); spelled out so the stream is identical on every
// platform for a given seed.
double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

long long poisson_once(std::mt19937_64& g, double lambda) {
  if (lambda <= 0.0) return 0;
  const double u = uniform01(g);
  double p = std::exp(-lambda);
  double cum = p;
  long long k = 0;
  while (u > cum && k < 1000000) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cum += p;
  }
  return k;
}

// Poisson via CDF inversion on mean chunks small enough that exp(-lambda)
// stays well away from underflow.
long long poisson_draw(std::mt19937_64& g, double lambda) {
  long long total = 0;
  while (lambda > 30.0) {
    total += poisson_once(g, 30.0);
    lambda -= 30.0;
  }
  total += poisson_once(g, lambda);
  return total;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string setting_label(const Setting& s) {
  return std::string{sign_char(s.a), sign_char(s.b)};
}

Setting parse_setting(const std::string& label) {
  if (label.size() != 2)
    throw std::invalid_argument("setting label must be two signs: " + label);
  return Setting{parse_sign(label[0]), parse_sign(label[1])};
}

Setting identifying_setting(BellKind k) {
  switch (k) {
    case BellKind::PhiPlus:
      return Setting{PolSign::Plus, PolSign::Plus};
    case BellKind::PhiMinus:
      return Setting{PolSign::Minus, PolSign::Plus};
    case BellKind::PsiPlus:
      return Setting{PolSign::Plus, PolSign::Minus};
    case BellKind::PsiMinus:
      return Setting{PolSign::Minus, PolSign::Minus};
  }
  throw std::logic_error("bad BellKind");
}

QuantumState photon_number_sector(const QuantumState& s, int n) {
  QuantumState out(s.truncation(), s.epsilon());
  for (const auto& [f, amp] : s.terms())
    if (f.total_photons() == n) out.add(f, amp);
  return out;
}

double fourfold_probability(const QuantumState& s, int n_slots) {
  QuantumState sector = photon_number_sector(s, 4);
  sector_norm2_or_throw(sector);
  return project_occupation(sector, fourfold_pattern(n_slots)).probability;
}

double setting_probability(const QuantumState& s, const Setting& setting,
                           int n_slots) {
  QuantumState sector = photon_number_sector(s, 4);
  const double n2 = sector_norm2_or_throw(sector);
  QuantumState filtered = apply_output_polarizers(
      sector, setting.a, setting.b, PolSign::Plus, PolSign::Plus, n_slots);
  const auto proj = project_occupation(filtered, fourfold_pattern(n_slots));
  return proj.probability * filtered.norm2() / n2;
}

double outcome_resolved_success(const QuantumState& s, int n_slots) {
  QuantumState sector = photon_number_sector(s, 4);
  const double n2 = sector_norm2_or_throw(sector);
  const ProjectionPattern pat = fourfold_pattern(n_slots);
  double total = 0.0;
  for (PolSign a : {PolSign::Plus, PolSign::Minus})
    for (PolSign b : {PolSign::Plus, PolSign::Minus})
      for (PolSign c : {PolSign::Plus, PolSign::Minus})
        for (PolSign d : {PolSign::Plus, PolSign::Minus}) {
          QuantumState filtered =
              apply_output_polarizers(sector, a, b, c, d, n_slots);
          total += project_occupation(filtered, pat).probability *
                   filtered.norm2() / n2;
        }
  return total;
}

double coincidence_probability(const QuantumState& s,
                               const std::vector<Spatial>& rails) {
  double sum = 0.0;
  for (const auto& [f, amp] : s.terms()) {
    bool all = true;
    for (Spatial r : rails) {
      int n = 0;
      for (const auto& [m, c] : f.entries())
        if (m.spatial == r) n += c;
      if (n < 1) {
        all = false;
        break;
      }
    }
    if (all) sum += std::norm(amp);
  }
  return sum;
}

std::map<FockState, double> amplitude_weights(const QuantumState& s) {
  std::map<FockState, double> out;
  for (const auto& [f, amp] : s.terms()) out[f] = std::norm(amp);
  return out;
}

std::map<FockState, double> trace_temporal(
    const std::map<FockState, double>& weights) {
  std::map<FockState, double> out;
  for (const auto& [f, w] : weights) {
    std::vector<std::pair<Mode, int>> erased;
    erased.reserve(f.entries().size());
    for (const auto& [m, c] : f.entries())
      erased.emplace_back(Mode{m.spatial, m.pol, 0}, c);
    out[FockState(std::move(erased))] += w;
  }
  return out;
}

std::vector<long long> sample_counts(const std::vector<double>& weights,
                                     double expected_total, uint64_t seed) {
  if (expected_total < 0.0)
    throw std::invalid_argument("expected_total must be >= 0");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w))
      throw std::invalid_argument("weights must be finite and >= 0");
    sum += w;
  }
  if (sum <= 0.0) throw std::invalid_argument("weights must not all be zero");
  std::mt19937_64 gen(seed);
  std::vector<long long> counts;
  counts.reserve(weights.size());
  for (double w : weights)
    counts.push_back(poisson_draw(gen, expected_total * w / sum));
  return counts;
}

FidelityEstimate fidelity_from_counts(const std::array<long long, 4>& counts,
                                      int correct_index) {
  if (correct_index < 0 || correct_index >= 4)
    throw std::invalid_argument("correct_index out of range");
  long long total = 0;
  for (long long c : counts) {
    if (c < 0) throw std::invalid_argument("counts must be >= 0");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("fidelity needs nonzero counts");
  const double f =
      static_cast<double>(counts[static_cast<std::size_t>(correct_index)]) /
      static_cast<double>(total);
  const double sigma = std::sqrt(f * (1.0 - f) / static_cast<double>(total));
  return FidelityEstimate{f, sigma};
}

std::string to_csv(const CountTable& t) {
  std::string out = "input,setting,counts,duration_s,seed\n";
  for (const auto& r : t.rows) {
    out += r.input;
    out += ',';
    out += r.setting;
    out += ',';
    out += std::to_string(r.counts);
    out += ',';
    out += format_double(r.duration_s);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

CountTable table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "input,setting,counts,duration_s,seed")
    throw std::invalid_argument("bad count-table CSV header");
  CountTable t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 5)
      throw std::invalid_argument("count-table row needs 5 fields: " + line);
    CountRow r;
    r.input = fields[0];
    r.setting = fields[1];
    r.counts = parse_ll(fields[2]);
    r.duration_s = parse_double(fields[3]);
    r.seed = parse_u64(fields[4]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

std::string to_json(const CountTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back(json{{"input", r.input},
                        {"setting", r.setting},
                        {"counts", r.counts},
                        {"duration_s", r.duration_s},
                        {"seed", r.seed}});
  return json{{"rows", rows}}.dump(2);
}

CountTable table_from_json(const std::string& text) {
  const json j = json::parse(text);
  CountTable t;
  for (const auto& row : j.at("rows")) {
    CountRow r;
    r.input = row.at("input").get<std::string>();
    r.setting = row.at("setting").get<std::string>();
    r.counts = row.at("counts").get<long long>();
    r.duration_s = row.at("duration_s").get<double>();
    r.seed = row.at("seed").get<uint64_t>();
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace bsa

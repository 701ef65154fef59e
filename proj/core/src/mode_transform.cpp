#include "bsasim/mode_transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace bsa {

namespace {

bool check_unitary(const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd g = m.adjoint() * m;
  g -= Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  return g.cwiseAbs().maxCoeff() < 1e-12;
}

}  // namespace

ModeTransform::ModeTransform(std::vector<Mode> domain_in, Eigen::MatrixXcd matrix_in)
    : domain(std::move(domain_in)), matrix(std::move(matrix_in)) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("transform matrix must be square");
  if (std::size_t(matrix.rows()) != domain.size())
    throw std::invalid_argument("transform matrix size must match domain size");
  std::vector<Mode> sorted = domain;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("transform domain contains duplicate modes");
  unitary = check_unitary(matrix);
}

ModeTransform compose(const ModeTransform& second, const ModeTransform& first) {
  std::vector<Mode> merged = first.domain;
  for (const Mode& m : second.domain) {
    if (std::find(merged.begin(), merged.end(), m) == merged.end())
      merged.push_back(m);
  }
  std::sort(merged.begin(), merged.end());
  const int n = int(merged.size());

  auto lift = [&](const ModeTransform& t) {
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Identity(n, n);
    std::vector<int> pos(t.domain.size());
    for (std::size_t i = 0; i < t.domain.size(); ++i) {
      pos[i] = int(std::lower_bound(merged.begin(), merged.end(), t.domain[i]) -
                   merged.begin());
    }
    for (std::size_t i = 0; i < t.domain.size(); ++i) {
      big.col(pos[i]).setZero();
      for (std::size_t j = 0; j < t.domain.size(); ++j) {
        big(pos[j], pos[i]) = t.matrix(Eigen::Index(j), Eigen::Index(i));
      }
    }
    return big;
  };

  Eigen::MatrixXcd m = lift(second) * lift(first);
  return ModeTransform(std::move(merged), std::move(m));
}

QuantumState apply_transform(const QuantumState& s, const ModeTransform& t) {
  const int n = int(t.domain.size());
  std::map<Mode, int> index;
  for (int i = 0; i < n; ++i) index[t.domain[i]] = i;

  // Precomputed sparse columns: (row, coefficient) per domain operator.
  std::vector<std::vector<std::pair<int, cplx>>> cols(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cplx v = t.matrix(j, i);
      if (std::abs(v) != 0.0) cols[i].emplace_back(j, v);
    }
  }

  QuantumState out(s.truncation(), s.epsilon());
  for (const auto& [f, amp] : s.terms()) {
    // Split occupation into the transformed part and the untouched rest.
    std::vector<int> in_counts(n, 0);
    bool touched = false;
    for (const auto& [m, c] : f.entries()) {
      auto it = index.find(m);
      if (it != index.end()) {
        in_counts[it->second] = c;
        touched = true;
      }
    }
    if (!touched) {
      out.add(f, amp);
      continue;
    }
    FockState rest = f.without_modes(t.domain);

    // Expand prod_i (sum_j M(j,i) a_j^dag)^{n_i} as a polynomial keyed by the
    // exponent vector over the domain.
    std::map<std::vector<int>, cplx> poly;
    poly.emplace(std::vector<int>(n, 0), cplx(1.0));
    double pref = 1.0;
    for (int i = 0; i < n; ++i) {
      int c = in_counts[i];
      for (int k = 0; k < c; ++k) {
        pref /= std::sqrt(double(k + 1));
        std::map<std::vector<int>, cplx> next;
        for (const auto& [exps, coef] : poly) {
          for (const auto& [row, mcoef] : cols[i]) {
            std::vector<int> e2 = exps;
            ++e2[row];
            auto [it, inserted] = next.try_emplace(std::move(e2), coef * mcoef);
            if (!inserted) it->second += coef * mcoef;
          }
        }
        poly = std::move(next);
      }
    }

    for (const auto& [exps, coef] : poly) {
      if (std::abs(coef) == 0.0) continue;
      double boson = 1.0;
      std::vector<FockState::Entry> entries = rest.entries();
      for (int j = 0; j < n; ++j) {
        if (exps[j] == 0) continue;
        for (int k = 1; k <= exps[j]; ++k) boson *= std::sqrt(double(k));
        entries.emplace_back(t.domain[j], exps[j]);
      }
      out.add(FockState(std::move(entries)), amp * pref * coef * boson);
    }
  }
  out.prune();
  return out;
}

}  // namespace bsa

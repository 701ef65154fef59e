#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bsasim/quantum_state.hpp"

namespace bsa {

// Linear transform of creation operators.  Column i of `matrix` is the image
// of domain[i]:  a^dagger(domain[i]) -> sum_j matrix(j, i) a^dagger(domain[j]).
// Photons in modes outside the domain are untouched.
struct ModeTransform {
  std::vector<Mode> domain;
  Eigen::MatrixXcd matrix;
  bool unitary = false;

  ModeTransform(std::vector<Mode> domain_in, Eigen::MatrixXcd matrix_in);

  bool is_unitary() const { return unitary; }
};

// second after first, as a single transform over the union of domains.
ModeTransform compose(const ModeTransform& second, const ModeTransform& first);

// Rewrites every occupied domain operator and re-expands.  Norm is preserved
// to machine precision when the transform is unitary.
QuantumState apply_transform(const QuantumState& s, const ModeTransform& t);

}  // namespace bsa

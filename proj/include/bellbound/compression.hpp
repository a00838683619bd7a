#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bellbound/quantum.hpp"

namespace bellbound {

/// Singular values of the amplitude matrix below this are treated as zero.
inline constexpr double kSchmidtThreshold = 1e-12;

/// psi = sum_i coefficients(i) * left.col(i) ⊗ right.col(i), coefficients
/// strictly positive and descending.
struct SchmidtData {
  Eigen::VectorXd coefficients;
  MatrixXcd left;   // d_A x rank, orthonormal columns
  MatrixXcd right;  // d_B x rank, orthonormal columns

  Index rank() const { return coefficients.size(); }
  VectorXcd reconstruct() const;
};

/// sum_i |u_i><u_i| ⊗ |v_i><v_i| on H_A ⊗ H_B.
struct SchmidtProjector {
  MatrixXcd matrix;
  Index rank = 0;
};

SchmidtData schmidt_decompose(const StateVector& psi);
SchmidtProjector schmidt_projector(const SchmidtData& sd);

/// Effects restricted to the span of `basis` (orthonormal columns) and
/// expressed in that basis: M -> B^† M B, then sanitized.
Povm compress_povm(const Povm& povm, const MatrixXcd& basis);

struct CompressionResult {
  QuantumRealization realization;
  std::vector<Index> old_dims;
  /// Size of the purification ancilla merged into the compressed party before
  /// the cut was taken; 1 for pure inputs.
  Index ancilla_dim = 1;
};

/// Both parties of a bipartite realization re-expressed on the Schmidt
/// support: output dims (r, r), r the Schmidt rank. Mixed states are purified
/// with the ancilla attached to party 2.
CompressionResult compress_bipartite(const QuantumRealization& r);

/// Parties 1..N-1 are grouped into one effective party and the last party is
/// re-expressed on its Schmidt support across that cut. The first N-1 local
/// spaces and measurements are untouched; the last dimension becomes the
/// Schmidt rank, which never exceeds d_1 * ... * d_{N-1}.
CompressionResult compress_last_party(const QuantumRealization& r);

}  // namespace bellbound

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bellbound/linalg.hpp"
#include "bellbound/scenario.hpp"

namespace bellbound {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

inline constexpr double kOperatorTolerance = 1e-10;

struct StateVector {
  std::vector<Index> dims;
  VectorXcd amplitudes;
};

struct DensityOperator {
  MatrixXcd matrix;
  Index dim() const { return matrix.rows(); }
};

/// Effects indexed by outcome. Projective when every effect is a projector.
struct Povm {
  std::vector<MatrixXcd> effects;
  int outcome_count() const { return static_cast<int>(effects.size()); }
  Index dim() const { return effects.empty() ? 0 : effects.front().rows(); }
};

using QuantumState = std::variant<StateVector, DensityOperator>;

struct QuantumRealization {
  Scenario scenario;
  std::vector<Index> dims;
  QuantumState state;
  std::vector<std::vector<Povm>> measurements;  // [party][setting]

  bool is_pure() const { return std::holds_alternative<StateVector>(state); }
};

// Invariant checks. Each throws Error(InvalidArgument or DimensionMismatch)
// naming the violated property.
void check_state(const StateVector& psi, double tol = kOperatorTolerance);
void check_state(const DensityOperator& rho, double tol = kOperatorTolerance);
void check_povm(const Povm& povm, double tol = kOperatorTolerance);
void check_realization(const QuantumRealization& r, double tol = kOperatorTolerance);

MatrixXcd density_matrix(const QuantumState& state);

/// P(a|x) = Tr[rho (M_{a_1|x_1} ⊗ ... ⊗ M_{a_N|x_N})].
Behavior born_evaluate(const QuantumRealization& r);

/// Standard purification sum_i sqrt(p_i) |e_i>|i> over the eigenvalues of rho
/// above 1e-12; the result has dims (rho.dim(), rank).
StateVector purify(const DensityOperator& rho);

/// Rewrites a mixed-state realization as a pure one by purifying and merging
/// the ancilla into `party`'s local space (its effects become M ⊗ I). Pure
/// inputs are returned unchanged. `ancilla_dim` receives the ancilla size.
QuantumRealization purify_into(const QuantumRealization& r, int party,
                               Index* ancilla_dim = nullptr);

/// Re-Hermitizes every effect, zeroes negative eigenvalues down to -clip and
/// restores completeness by replacing the final effect with I - sum(others).
Povm sanitize_povm(const Povm& povm, double clip = kOperatorTolerance);

// Seeded generators.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);
MatrixXcd random_unitary(Index d, std::mt19937_64& rng);
VectorXcd random_unit_vector(Index d, std::mt19937_64& rng);
Povm random_projective_povm(Index d, int outcomes, std::mt19937_64& rng);

/// Haar-like pure state and random coarse-grained projective measurements.
QuantumRealization random_realization(const Scenario& s,
                                      std::span<const Index> dims,
                                      std::uint64_t seed);
QuantumRealization random_realization(const Scenario& s,
                                      std::span<const Index> dims,
                                      std::mt19937_64& rng);

}  // namespace bellbound

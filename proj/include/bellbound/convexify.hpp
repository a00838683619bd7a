#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bellbound/quantum.hpp"
#include "bellbound/scenario.hpp"

namespace bellbound {

struct ConvexDecomposition {
  std::vector<double> weights;
  std::vector<Behavior> components;
  /// Position of each component in the generator list it was drawn from.
  std::vector<std::size_t> generator_indices;
  Behavior target;
};

/// Raised by decompose when the target is outside the generators' hull;
/// carries the separating functional found by the LP.
class NotInHullError : public Error {
 public:
  NotInHullError(const std::string& what, Witness witness)
      : Error(ErrorKind::NotInHull, what), witness_(std::move(witness)) {}
  const Witness& witness() const { return witness_; }

 private:
  Witness witness_;
};

struct WeightedRealization {
  double weight = 0;
  QuantumRealization realization;
};

struct Generator {
  Behavior behavior;
  QuantumRealization realization;
};

/// Carathéodory number bound for a set in the scenario's behavior space:
/// the affine dimension for pathwise-connected sets, one more otherwise.
std::int64_t caratheodory_bound(const Scenario& s, bool assume_connected);

/// Drops components along null directions of the affine system until the
/// remaining ones are affinely independent (hence at most affine_dimension+1).
ConvexDecomposition caratheodory_reduce(ConvexDecomposition d);

/// Convex weights over `generators` reproducing `target` within 1e-8, with
/// affinely independent support. Throws NotInHullError.
ConvexDecomposition decompose(const Behavior& target, std::span<const Behavior> generators);

/// dims scaled entrywise by the connected Carathéodory bound, or by
/// `bound_override` when given.
std::vector<Index> ancilla_dimension(std::span<const Index> dims, const Scenario& s,
                                     std::optional<std::int64_t> bound_override = {});

/// One realization of the mixture sum_k w_k P_k: every local space becomes the
/// direct sum of the parts' local spaces, the state is the weighted direct sum
/// of the parts' states in matching blocks, and every effect is block
/// diagonal. The block label plays the role of a perfectly correlated
/// classical ancilla.
QuantumRealization mixture_realization(std::span<const WeightedRealization> parts);

/// decompose() followed by mixture_realization() of the chosen generators.
QuantumRealization realize_nonextremal(const Behavior& target,
                                       std::span<const Generator> generators);

}  // namespace bellbound

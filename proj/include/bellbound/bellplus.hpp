#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bellbound/scenario.hpp"

namespace bellbound {

/// A party of a Bell scenario with communication. Its setting is a tuple of
/// slots; a slot is either exogenous or bound to another party's outcome.
/// `outcomes` lists the outcome count for every slot tuple, enumerated
/// lexicographically with slot 0 slowest.
struct PartySpec {
  std::vector<int> slots;
  std::vector<int> outcomes;
};

/// The outcome of `from_party` is fed into slot `to_setting_slot` of
/// `to_party`.
struct DependencyEdge {
  int from_party = 0;
  int to_party = 0;
  int to_setting_slot = 0;
  friend bool operator==(const DependencyEdge&, const DependencyEdge&) = default;
};

struct CausalScenario {
  std::vector<PartySpec> parties;
  std::vector<DependencyEdge> edges;
};

/// Exogenous copy variable standing in for a removed edge.
struct Binding {
  int party = 0;
  int slot = 0;
  int source_party = 0;
  friend bool operator==(const Binding&, const Binding&) = default;
};

struct InterruptionMap {
  CausalScenario causal;
  /// Standard Bell scenario in which every slot is free.
  Scenario interrupted;
  /// Scenario of the communication behaviors: settings range over the
  /// exogenous slots only.
  Scenario bellplus;
  std::vector<Binding> bindings;
};

struct ProjectionResult {
  Behavior behavior;
  double normalization_residual = 0;
  bool normalization_warning = false;
};

struct BellPlusBounds {
  bool applicable = false;
  Scenario interrupted;
  std::int64_t affine_dimension = 0;
  std::vector<Index> extremal_caps;  // convexly extremal correlations
  std::vector<Index> general_caps;   // every correlation
  std::vector<std::string> notes;
};

/// Throws InvalidArgument on malformed input and CyclicDependency when the
/// outcome-to-setting graph has a cycle.
void check_causal(const CausalScenario& c);

/// Scenario of a causal scenario without edges, i.e. one setting per slot
/// tuple.
Scenario free_scenario(const CausalScenario& c);

InterruptionMap maximal_interruption(const CausalScenario& c);

/// P+(a | x_exo) = P(a | x with every bound slot set to its source outcome).
ProjectionResult project_behavior(const Behavior& b, const InterruptionMap& m);

BellPlusBounds bellplus_dimension_bound(const CausalScenario& c);

}  // namespace bellbound

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellbound/bellplus.hpp"
#include "bellbound/compression.hpp"
#include "bellbound/convexify.hpp"
#include "bellbound/optimize.hpp"
#include "bellbound/quantum.hpp"
#include "bellbound/scenario.hpp"

// JSON interchange. Every real number is emitted with 12 significant digits
// and complex numbers as [re, im] pairs. Parse failures throw
// Error(InvalidArgument).

namespace bellbound::io {

using json = nlohmann::json;

double round12(double v);

json read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const json& j);
std::string dump(const json& j);

/// Accepts either the bare nested outcome array or any object with a
/// "scenario" member.
Scenario scenario_from_json(const json& j);
json to_json(const Scenario& s);

Behavior behavior_from_json(const json& j);
json to_json(const Behavior& b);

json to_json(const MatrixXcd& m);
MatrixXcd matrix_from_json(const json& j);
json to_json(const VectorXcd& v);
VectorXcd vector_from_json(const json& j);

QuantumRealization realization_from_json(const json& j);
json to_json(const QuantumRealization& r);

BellFunctional functional_from_json(const json& j);
json to_json(const BellFunctional& f);

CausalScenario causal_from_json(const json& j);
json to_json(const CausalScenario& c);

/// Rebuilt from its "causal" member; stored bindings, when present, must agree.
InterruptionMap interruption_from_json(const json& j);
json to_json(const InterruptionMap& m);

json to_json(const MembershipResult& r);
json to_json(const ValidationReport& r);
json to_json(const Witness& w);
json to_json(const ConvexDecomposition& d);
json to_json(const BellPlusBounds& b);
json to_json(const CompressionResult& c, double max_behavior_deviation);
json to_json(const SeesawResult& r, bool include_traces = false);

/// A generator list: each element is a behavior, a realization, or an object
/// holding either or both. Missing behaviors are computed with the Born rule;
/// realizations may be absent only when `need_realizations` is false.
std::vector<Generator> generators_from_json(const json& j, bool need_realizations);

std::vector<WeightedRealization> parts_from_json(const json& j);

std::vector<Index> parse_dims(const std::string& text);

}  // namespace bellbound::io

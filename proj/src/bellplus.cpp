#include "bellbound/bellplus.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "bellbound/optimize.hpp"

namespace bellbound {

namespace {

int slot_product(const std::vector<int>& slots) {
  int total = 1;
  for (int s : slots) total *= s;
  return total;
}

bool uniform(const std::vector<int>& v) {
  return std::all_of(v.begin(), v.end(), [&](int k) { return k == v.front(); });
}

// binding_source[p][slot] = source party, or -1 for exogenous slots.
std::vector<std::vector<int>> slot_sources(const CausalScenario& c) {
  std::vector<std::vector<int>> src(c.parties.size());
  for (std::size_t p = 0; p < c.parties.size(); ++p) src[p].assign(c.parties[p].slots.size(), -1);
  for (const auto& e : c.edges) src[e.to_party][e.to_setting_slot] = e.from_party;
  return src;
}

}  // namespace

void check_causal(const CausalScenario& c) {
  const int n = static_cast<int>(c.parties.size());
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "causal scenario needs at least one party");
  for (int p = 0; p < n; ++p) {
    const auto& party = c.parties[p];
    for (int s : party.slots) {
      if (s < 1) throw Error(ErrorKind::InvalidArgument, "slot cardinalities must be positive");
    }
    if (static_cast<int>(party.outcomes.size()) != slot_product(party.slots)) {
      throw Error(ErrorKind::InvalidArgument,
                  "party " + std::to_string(p) + ": need one outcome count per slot tuple");
    }
    for (int k : party.outcomes) {
      if (k < 1) throw Error(ErrorKind::InvalidArgument, "outcome counts must be positive");
    }
  }

  std::vector<std::vector<int>> bound(n);
  for (int p = 0; p < n; ++p) bound[p].assign(c.parties[p].slots.size(), 0);
  std::vector<std::vector<int>> children(n);
  std::vector<int> indegree(n, 0);
  for (const auto& e : c.edges) {
    if (e.from_party < 0 || e.from_party >= n || e.to_party < 0 || e.to_party >= n) {
      throw Error(ErrorKind::InvalidArgument, "edge refers to an unknown party");
    }
    const auto& target = c.parties[e.to_party];
    if (e.to_setting_slot < 0 || e.to_setting_slot >= static_cast<int>(target.slots.size())) {
      throw Error(ErrorKind::InvalidArgument, "edge refers to an unknown setting slot");
    }
    if (bound[e.to_party][e.to_setting_slot]++) {
      throw Error(ErrorKind::InvalidArgument, "setting slot bound by more than one edge");
    }
    const auto& source = c.parties[e.from_party];
    if (!uniform(source.outcomes)) {
      throw Error(ErrorKind::InvalidArgument,
                  "party " + std::to_string(e.from_party) +
                      " feeds a setting but its outcome count varies with its setting");
    }
    if (source.outcomes.front() != target.slots[e.to_setting_slot]) {
      throw Error(ErrorKind::InvalidArgument,
                  "slot cardinality differs from the outcome count of its source");
    }
    if (!uniform(target.outcomes)) {
      throw Error(ErrorKind::InvalidArgument,
                  "party " + std::to_string(e.to_party) +
                      " has a bound slot, so its outcome count must not vary with its setting");
    }
    children[e.from_party].push_back(e.to_party);
    ++indegree[e.to_party];
  }

  std::queue<int> ready;
  for (int p = 0; p < n; ++p) {
    if (indegree[p] == 0) ready.push(p);
  }
  int visited = 0;
  while (!ready.empty()) {
    const int p = ready.front();
    ready.pop();
    ++visited;
    for (int q : children[p]) {
      if (--indegree[q] == 0) ready.push(q);
    }
  }
  if (visited != n) throw Error(ErrorKind::CyclicDependency, "dependency graph has a cycle");
}

Scenario free_scenario(const CausalScenario& c) {
  std::vector<std::vector<int>> outcomes;
  for (const auto& party : c.parties) outcomes.push_back(party.outcomes);
  return Scenario(std::move(outcomes));
}

InterruptionMap maximal_interruption(const CausalScenario& c) {
  check_causal(c);
  InterruptionMap m;
  m.causal = c;
  m.interrupted = free_scenario(c);

  const auto sources = slot_sources(c);
  std::vector<std::vector<int>> outcomes;
  for (std::size_t p = 0; p < c.parties.size(); ++p) {
    const auto& party = c.parties[p];
    int exogenous = 1;
    bool has_bound = false;
    for (std::size_t s = 0; s < party.slots.size(); ++s) {
      if (sources[p][s] < 0) {
        exogenous *= party.slots[s];
      } else {
        has_bound = true;
        m.bindings.push_back({static_cast<int>(p), static_cast<int>(s), sources[p][s]});
      }
    }
    outcomes.push_back(has_bound ? std::vector<int>(exogenous, party.outcomes.front())
                                 : party.outcomes);
  }
  m.bellplus = Scenario(std::move(outcomes));
  return m;
}

ProjectionResult project_behavior(const Behavior& b, const InterruptionMap& m) {
  if (!(b.scenario == m.interrupted)) {
    throw Error(ErrorKind::ShapeMismatch, "behavior is not on the interrupted scenario");
  }
  const auto& c = m.causal;
  const int n = static_cast<int>(c.parties.size());
  const auto sources = slot_sources(c);

  ProjectionResult result;
  Eigen::VectorXd values(m.bellplus.behavior_size());
  std::vector<int> full(n);
  m.bellplus.for_each_entry([&](const std::vector<int>& x, const std::vector<int>& a, Index idx) {
    for (int p = 0; p < n; ++p) {
      const auto& slots = c.parties[p].slots;
      // Decode the exogenous setting into slot values (last slot fastest),
      // fill bound slots from the source outcomes, and re-flatten.
      std::vector<int> value(slots.size());
      int rem = x[p];
      for (int s = static_cast<int>(slots.size()) - 1; s >= 0; --s) {
        if (sources[p][s] >= 0) continue;
        value[s] = rem % slots[s];
        rem /= slots[s];
      }
      int flat = 0;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        if (sources[p][s] >= 0) value[s] = a[sources[p][s]];
        flat = flat * slots[s] + value[s];
      }
      full[p] = flat;
    }
    values[idx] = b(full, a);
  });
  result.behavior = Behavior(m.bellplus, std::move(values));

  for (Index js = 0; js < m.bellplus.joint_setting_count(); ++js) {
    const double total =
        result.behavior.values.segment(m.bellplus.block_offset(js), m.bellplus.block_size(js)).sum();
    result.normalization_residual = std::max(result.normalization_residual, std::abs(total - 1.0));
  }
  result.normalization_warning = result.normalization_residual > 1e-9;
  return result;
}

BellPlusBounds bellplus_dimension_bound(const CausalScenario& c) {
  const InterruptionMap m = maximal_interruption(c);
  BellPlusBounds out;
  out.interrupted = m.interrupted;
  out.affine_dimension = affine_dimension(m.interrupted);
  try {
    out.extremal_caps = preset_dimension_caps(m.interrupted);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotApplicable) throw;
    out.applicable = false;
    out.notes.push_back(std::string("NotApplicable: ") + e.what());
    return out;
  }
  out.applicable = true;
  for (Index d : out.extremal_caps) out.general_caps.push_back(d * out.affine_dimension);
  if (!m.bindings.empty()) {
    out.notes.push_back(
        "projection does not preserve convex extremality: extremal caps apply to "
        "images of extremal interrupted correlations; use general caps for arbitrary points");
  }
  return out;
}

}  // namespace bellbound

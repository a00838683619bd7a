#include "bellbound/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bellbound::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); }

template <typename Fn>
auto guarded(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string(what) + ": " + e.what());
  }
}

json number(double v) { return round12(v); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Eigen::VectorXd real_vector(const json& j) {
  if (!j.is_array()) bad("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

std::vector<Index> index_list(const json& j) {
  std::vector<Index> out;
  for (const auto& d : j) out.push_back(d.get<Index>());
  return out;
}

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) bad("complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

json complex_json(cplx z) { return json::array({number(z.real()), number(z.imag())}); }

json index_json(const std::vector<Index>& v) {
  json out = json::array();
  for (Index d : v) out.push_back(d);
  return out;
}

}  // namespace

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  return guarded(("parsing " + path.string()).c_str(), [&] { return json::parse(in); });
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bad("cannot write " + path.string());
  out << dump(j);
}

Scenario scenario_from_json(const json& j) {
  return guarded("scenario", [&] {
    if (j.is_object()) {
      if (!j.contains("scenario")) bad("object has no \"scenario\" member");
      return scenario_from_json(j.at("scenario"));
    }
    if (!j.is_array()) bad("scenario must be a nested array of outcome counts");
    return Scenario(j.get<std::vector<std::vector<int>>>());
  });
}

json to_json(const Scenario& s) { return s.outcomes(); }

Behavior behavior_from_json(const json& j) {
  return guarded("behavior", [&] {
    return Behavior(scenario_from_json(j.at("scenario")), real_vector(j.at("values")));
  });
}

json to_json(const Behavior& b) {
  return {{"scenario", to_json(b.scenario)}, {"values", vector_json(b.values)}};
}

json to_json(const MatrixXcd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXcd matrix_from_json(const json& j) {
  return guarded("matrix", [&] {
    if (!j.is_array()) bad("matrix must be an array of rows");
    const Index rows = static_cast<Index>(j.size());
    const Index cols = rows == 0 ? 0 : static_cast<Index>(j[0].size());
    MatrixXcd m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      if (static_cast<Index>(j[i].size()) != cols) bad("ragged matrix");
      for (Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
    }
    return m;
  });
}

json to_json(const VectorXcd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

VectorXcd vector_from_json(const json& j) {
  return guarded("vector", [&] {
    if (!j.is_array()) bad("vector must be an array");
    VectorXcd v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
    return v;
  });
}

QuantumRealization realization_from_json(const json& j) {
  return guarded("realization", [&] {
    QuantumRealization r;
    r.scenario = scenario_from_json(j.at("scenario"));
    r.dims = index_list(j.at("dims"));
    const json& state = j.at("state");
    const std::string kind = state.at("kind").get<std::string>();
    if (kind == "pure") {
      r.state = StateVector{r.dims, vector_from_json(state.at("data"))};
    } else if (kind == "mixed") {
      r.state = DensityOperator{matrix_from_json(state.at("data"))};
    } else {
      bad("state kind must be \"pure\" or \"mixed\"");
    }
    for (const auto& party : j.at("measurements")) {
      std::vector<Povm> settings;
      for (const auto& setting : party) {
        Povm povm;
        for (const auto& effect : setting) povm.effects.push_back(matrix_from_json(effect));
        settings.push_back(std::move(povm));
      }
      r.measurements.push_back(std::move(settings));
    }
    check_realization(r);
    return r;
  });
}

json to_json(const QuantumRealization& r) {
  json state;
  if (const auto* psi = std::get_if<StateVector>(&r.state)) {
    state = {{"kind", "pure"}, {"data", to_json(psi->amplitudes)}};
  } else {
    state = {{"kind", "mixed"}, {"data", to_json(std::get<DensityOperator>(r.state).matrix)}};
  }
  json measurements = json::array();
  for (const auto& party : r.measurements) {
    json settings = json::array();
    for (const auto& povm : party) {
      json effects = json::array();
      for (const auto& e : povm.effects) effects.push_back(to_json(e));
      settings.push_back(std::move(effects));
    }
    measurements.push_back(std::move(settings));
  }
  return {{"scenario", to_json(r.scenario)},
          {"dims", index_json(r.dims)},
          {"state", std::move(state)},
          {"measurements", std::move(measurements)}};
}

BellFunctional functional_from_json(const json& j) {
  return guarded("functional", [&] {
    BellFunctional f;
    f.scenario = scenario_from_json(j.at("scenario"));
    f.coefficients = real_vector(j.at("coefficients"));
    f.offset = j.value("offset", 0.0);
    if (f.coefficients.size() != f.scenario.behavior_size()) {
      throw Error(ErrorKind::ShapeMismatch, "functional coefficients do not match scenario");
    }
    return f;
  });
}

json to_json(const BellFunctional& f) {
  return {{"scenario", to_json(f.scenario)},
          {"coefficients", vector_json(f.coefficients)},
          {"offset", number(f.offset)}};
}

CausalScenario causal_from_json(const json& j) {
  return guarded("causal scenario", [&] {
    CausalScenario c;
    for (const auto& p : j.at("parties")) {
      PartySpec party;
      party.slots = p.value("slots", std::vector<int>{});
      int tuples = 1;
      for (int s : party.slots) tuples *= std::max(s, 0);
      const json& outcomes = p.at("outcomes");
      if (outcomes.is_number_integer()) {
        party.outcomes.assign(tuples, outcomes.get<int>());
      } else {
        party.outcomes = outcomes.get<std::vector<int>>();
      }
      c.parties.push_back(std::move(party));
    }
    for (const auto& e : j.value("edges", json::array())) {
      c.edges.push_back({e.at("from_party").get<int>(), e.at("to_party").get<int>(),
                         e.value("to_setting_slot", 0)});
    }
    check_causal(c);
    return c;
  });
}

json to_json(const CausalScenario& c) {
  json parties = json::array();
  for (const auto& p : c.parties) parties.push_back({{"slots", p.slots}, {"outcomes", p.outcomes}});
  json edges = json::array();
  for (const auto& e : c.edges) {
    edges.push_back({{"from_party", e.from_party},
                     {"to_party", e.to_party},
                     {"to_setting_slot", e.to_setting_slot}});
  }
  return {{"parties", std::move(parties)}, {"edges", std::move(edges)}};
}

InterruptionMap interruption_from_json(const json& j) {
  return guarded("interruption map", [&] {
    InterruptionMap m = maximal_interruption(causal_from_json(j.at("causal")));
    if (j.contains("bindings")) {
      std::vector<Binding> stored;
      for (const auto& b : j.at("bindings")) {
        stored.push_back({b.at("party").get<int>(), b.at("slot").get<int>(),
                          b.at("source_party").get<int>()});
      }
      if (stored != m.bindings) bad("stored bindings disagree with the causal scenario");
    }
    return m;
  });
}

json to_json(const InterruptionMap& m) {
  json bindings = json::array();
  for (const auto& b : m.bindings) {
    bindings.push_back({{"party", b.party}, {"slot", b.slot}, {"source_party", b.source_party}});
  }
  return {{"causal", to_json(m.causal)},
          {"interrupted", to_json(m.interrupted)},
          {"bellplus", to_json(m.bellplus)},
          {"bindings", std::move(bindings)}};
}

json to_json(const Witness& w) {
  return {{"coefficients", vector_json(w.coefficients)},
          {"behavior_value", number(w.behavior_value)},
          {"local_bound", number(w.local_bound)}};
}

json to_json(const MembershipResult& r) {
  if (const auto* in = std::get_if<Inside>(&r)) {
    json components = json::array();
    for (std::size_t i = 0; i < in->model.weights.size(); ++i) {
      components.push_back({{"weight", number(in->model.weights[i])},
                            {"vertex_index", in->model.vertex_indices[i]},
                            {"values", vector_json(in->model.components[i].values)}});
    }
    return {{"status", "inside"}, {"model", {{"components", std::move(components)}}}};
  }
  return {{"status", "outside"}, {"witness", to_json(std::get<Outside>(r).witness)}};
}

json to_json(const ValidationReport& r) {
  return {{"normalization", number(r.normalization)},
          {"nonnegativity", number(r.nonnegativity)},
          {"no_signaling", number(r.no_signaling)}};
}

json to_json(const ConvexDecomposition& d) {
  json components = json::array();
  for (std::size_t i = 0; i < d.weights.size(); ++i) {
    components.push_back({{"weight", number(d.weights[i])},
                          {"generator_index", d.generator_indices[i]},
                          {"values", vector_json(d.components[i].values)}});
  }
  double remix_error = 0;
  if (!d.components.empty()) {
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(d.target.values.size());
    for (std::size_t i = 0; i < d.weights.size(); ++i) mix += d.weights[i] * d.components[i].values;
    remix_error = (mix - d.target.values).cwiseAbs().maxCoeff();
  }
  return {{"scenario", to_json(d.target.scenario)},
          {"component_count", d.weights.size()},
          {"caratheodory_bound", caratheodory_bound(d.target.scenario, false)},
          {"max_remix_error", number(remix_error)},
          {"components", std::move(components)}};
}

json to_json(const BellPlusBounds& b) {
  json out = {{"applicable", b.applicable},
              {"interrupted", to_json(b.interrupted)},
              {"affine_dimension", b.affine_dimension},
              {"notes", b.notes}};
  if (b.applicable) {
    out["extremal_caps"] = index_json(b.extremal_caps);
    out["general_caps"] = index_json(b.general_caps);
  }
  return out;
}

json to_json(const CompressionResult& c, double max_behavior_deviation) {
  return {{"old_dims", index_json(c.old_dims)},
          {"new_dims", index_json(c.realization.dims)},
          {"purification_ancilla_dim", c.ancilla_dim},
          {"max_behavior_deviation", number(max_behavior_deviation)},
          {"realization", to_json(c.realization)}};
}

json to_json(const SeesawResult& r, bool include_traces) {
  json out = {{"value", number(r.value)},
              {"dims", index_json(r.realization.dims)},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"best_restart", r.best_restart},
              {"realization", to_json(r.realization)},
              {"behavior", to_json(r.behavior)}};
  json runs = json::array();
  for (const auto& run : r.runs) {
    json entry = {{"value", number(run.value)},
                  {"iterations", run.iterations},
                  {"converged", run.converged}};
    if (include_traces) {
      json trace = json::array();
      for (double v : run.trace) trace.push_back(number(v));
      entry["trace"] = std::move(trace);
    }
    runs.push_back(std::move(entry));
  }
  out["runs"] = std::move(runs);
  return out;
}

std::vector<Generator> generators_from_json(const json& j, bool need_realizations) {
  return guarded("generators", [&] {
    if (!j.is_array()) bad("generators must be an array");
    std::vector<Generator> out;
    for (const auto& item : j) {
      Generator g;
      const bool bare_realization = item.contains("measurements");
      const bool has_realization = bare_realization || item.contains("realization");
      if (has_realization) {
        g.realization = realization_from_json(bare_realization ? item : item.at("realization"));
      } else if (need_realizations) {
        bad("every generator needs a realization here");
      }
      if (item.contains("values")) {
        g.behavior = behavior_from_json(item);
      } else if (item.contains("behavior")) {
        g.behavior = behavior_from_json(item.at("behavior"));
      } else if (has_realization) {
        g.behavior = born_evaluate(g.realization);
      } else {
        bad("generator has neither a behavior nor a realization");
      }
      out.push_back(std::move(g));
    }
    return out;
  });
}

std::vector<WeightedRealization> parts_from_json(const json& j) {
  return guarded("mixture parts", [&] {
    if (!j.is_array()) bad("mixture parts must be an array");
    std::vector<WeightedRealization> out;
    for (const auto& item : j) {
      out.push_back({item.at("weight").get<double>(), realization_from_json(item.at("realization"))});
    }
    return out;
  });
}

std::vector<Index> parse_dims(const std::string& text) {
  std::vector<Index> dims;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v < 1) throw std::invalid_argument(part);
      dims.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      bad("dims must be a comma-separated list of positive integers, got \"" + text + "\"");
    }
  }
  if (dims.empty()) bad("dims must not be empty");
  return dims;
}

}  // namespace bellbound::io

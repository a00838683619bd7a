// bellbound: command-line front end. Every subcommand reads JSON, writes one
// JSON artifact (stdout or -o) and one run report line on stderr.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bellbound/bellplus.hpp"
#include "bellbound/compression.hpp"
#include "bellbound/convexify.hpp"
#include "bellbound/io.hpp"
#include "bellbound/optimize.hpp"
#include "bellbound/quantum.hpp"
#include "bellbound/scenario.hpp"

namespace {

using bellbound::Index;
using bellbound::io::json;
namespace io = bellbound::io;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;

std::string fnv1a_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 1469598103934665603ull;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

struct Run {
  std::string command;
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
  std::string output;  // empty: stdout
  std::vector<std::string> warnings;
  json artifact;
};

struct Options {
  std::string output;
  std::string scenario_file, behavior_file, realization_file, functional_file;
  std::string target_file, generators_file, parts_file, causal_file, map_file;
  std::string dims;
  std::string party = "auto";
  int restarts = 32;
  int max_iterations = 500;
  int max_dim = 4;
  int threads = 0;
  double tolerance = 1e-10;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> bound;
  std::uint64_t cap = bellbound::kDefaultVertexCap;
  bool generic = false;
  bool trace = false;
};

bellbound::SeesawConfig seesaw_config(const Options& o) {
  bellbound::SeesawConfig cfg;
  cfg.restarts = o.restarts;
  cfg.max_iterations = o.max_iterations;
  cfg.tolerance = o.tolerance;
  cfg.seed = *o.seed;
  cfg.threads = o.threads;
  cfg.record_trace = o.trace;
  return cfg;
}

std::vector<Index> dims_or_preset(const Options& o, const bellbound::Scenario& s) {
  if (!o.dims.empty()) return io::parse_dims(o.dims);
  return bellbound::preset_dimension_caps(s);
}

json index_json(const std::vector<Index>& v) {
  json out = json::array();
  for (Index d : v) out.push_back(d);
  return out;
}

void cmd_affdim(const Options& o, Run& run) {
  run.inputs = {o.scenario_file};
  const auto s = io::scenario_from_json(io::read_file(o.scenario_file));
  run.artifact = {{"scenario", io::to_json(s)},
                  {"affine_dimension", bellbound::affine_dimension(s)}};
}

void cmd_vertices(const Options& o, Run& run) {
  run.inputs = {o.scenario_file};
  const auto s = io::scenario_from_json(io::read_file(o.scenario_file));
  const auto vertices = bellbound::enumerate_local_vertices(s, o.cap);
  json values = json::array();
  for (const auto& v : vertices) values.push_back(io::to_json(v)["values"]);
  run.artifact = {{"scenario", io::to_json(s)},
                  {"count", vertices.size()},
                  {"vertices", std::move(values)}};
}

void cmd_member(const Options& o, Run& run) {
  run.inputs = {o.behavior_file};
  const auto b = io::behavior_from_json(io::read_file(o.behavior_file));
  const auto report = bellbound::validate_behavior(b);
  if (report.no_signaling > 1e-10) run.warnings.push_back("behavior is signaling");
  run.artifact = io::to_json(bellbound::local_membership(b, o.cap));
}

void cmd_validate(const Options& o, Run& run) {
  run.inputs = {o.behavior_file};
  const auto b = io::behavior_from_json(io::read_file(o.behavior_file));
  run.artifact = io::to_json(bellbound::validate_behavior(b));
}

void cmd_born(const Options& o, Run& run) {
  run.inputs = {o.realization_file};
  const auto r = io::realization_from_json(io::read_file(o.realization_file));
  run.artifact = io::to_json(bellbound::born_evaluate(r));
}

void cmd_compress(const Options& o, Run& run) {
  run.inputs = {o.realization_file};
  const auto r = io::realization_from_json(io::read_file(o.realization_file));
  std::string mode = o.party;
  if (mode == "auto") mode = r.scenario.party_count() == 2 ? "2" : "last";
  const auto result = mode == "2" ? bellbound::compress_bipartite(r) : bellbound::compress_last_party(r);
  const auto before = bellbound::born_evaluate(r);
  const auto after = bellbound::born_evaluate(result.realization);
  const double deviation = (before.values - after.values).cwiseAbs().maxCoeff();
  if (result.ancilla_dim > 1) {
    run.warnings.push_back("mixed state purified; ancilla of dimension " +
                           std::to_string(result.ancilla_dim) + " merged into the compressed party");
  }
  run.artifact = io::to_json(result, deviation);
}

void cmd_seesaw(const Options& o, Run& run) {
  run.inputs = {o.functional_file};
  run.seed = o.seed;
  const auto f = io::functional_from_json(io::read_file(o.functional_file));
  const auto dims = dims_or_preset(o, f.scenario);
  const auto result = bellbound::seesaw_maximize(f, dims, seesaw_config(o));
  if (!result.converged) run.warnings.push_back("best restart hit max_iterations before converging");
  run.artifact = io::to_json(result, o.trace);
}

void cmd_sweep(const Options& o, Run& run) {
  run.inputs = {o.functional_file};
  run.seed = o.seed;
  const auto f = io::functional_from_json(io::read_file(o.functional_file));
  const auto classical = bellbound::classical_maximize(f, o.cap);
  json rows = json::array();
  for (int d = 1; d <= o.max_dim; ++d) {
    const std::vector<Index> dims(f.scenario.party_count(), d);
    const auto result = bellbound::seesaw_maximize(f, dims, seesaw_config(o));
    rows.push_back({{"dims", index_json(dims)},
                    {"value", io::round12(result.value)},
                    {"converged", result.converged}});
  }
  run.artifact = {{"classical_bound", io::round12(classical.value)}, {"sweep", std::move(rows)}};
}

void cmd_decompose(const Options& o, Run& run) {
  run.inputs = {o.target_file, o.generators_file};
  const auto target = io::behavior_from_json(io::read_file(o.target_file));
  const auto generators = io::generators_from_json(io::read_file(o.generators_file), false);
  std::vector<bellbound::Behavior> behaviors;
  for (const auto& g : generators) behaviors.push_back(g.behavior);
  run.artifact = io::to_json(bellbound::decompose(target, behaviors));
}

void cmd_realize(const Options& o, Run& run) {
  run.inputs = {o.target_file, o.generators_file};
  const auto target = io::behavior_from_json(io::read_file(o.target_file));
  const auto generators = io::generators_from_json(io::read_file(o.generators_file), true);
  const auto r = bellbound::realize_nonextremal(target, generators);
  const auto b = bellbound::born_evaluate(r);
  run.artifact = {{"dims", index_json(r.dims)},
                  {"max_behavior_deviation",
                   io::round12((b.values - target.values).cwiseAbs().maxCoeff())},
                  {"realization", io::to_json(r)}};
}

void cmd_realize_mixture(const Options& o, Run& run) {
  run.inputs = {o.parts_file};
  const auto parts = io::parts_from_json(io::read_file(o.parts_file));
  run.artifact = io::to_json(bellbound::mixture_realization(parts));
}

void cmd_dstar(const Options& o, Run& run) {
  run.inputs = {o.scenario_file};
  const auto s = io::scenario_from_json(io::read_file(o.scenario_file));
  const auto dims = dims_or_preset(o, s);
  const std::int64_t bound = o.bound ? *o.bound : bellbound::caratheodory_bound(s, !o.generic);
  run.artifact = {{"scenario", io::to_json(s)},
                  {"dims", index_json(dims)},
                  {"affine_dimension", bellbound::affine_dimension(s)},
                  {"caratheodory_bound", bound},
                  {"dstar", index_json(bellbound::ancilla_dimension(dims, s, bound))}};
}

void cmd_interrupt(const Options& o, Run& run) {
  run.inputs = {o.causal_file};
  const auto c = io::causal_from_json(io::read_file(o.causal_file));
  run.artifact = io::to_json(bellbound::maximal_interruption(c));
}

void cmd_project(const Options& o, Run& run) {
  run.inputs = {o.behavior_file, o.map_file};
  const auto b = io::behavior_from_json(io::read_file(o.behavior_file));
  const auto m = io::interruption_from_json(io::read_file(o.map_file));
  const auto result = bellbound::project_behavior(b, m);
  if (result.normalization_warning) {
    run.warnings.push_back("NormalizationWarning: projected behavior is not normalized (residual " +
                           std::to_string(result.normalization_residual) + ")");
  }
  run.artifact = io::to_json(result.behavior);
  run.artifact["normalization_residual"] = io::round12(result.normalization_residual);
}

void cmd_bounds(const Options& o, Run& run) {
  run.inputs = {o.causal_file};
  const auto c = io::causal_from_json(io::read_file(o.causal_file));
  run.artifact = io::to_json(bellbound::bellplus_dimension_bound(c));
}

void emit_report(const Run& run, double seconds) {
  json inputs = json::array();
  for (const auto& path : run.inputs) inputs.push_back({{"path", path}, {"fnv1a64", fnv1a_hex(path)}});
  json report = {{"command", run.command},
                 {"inputs", std::move(inputs)},
                 {"seed", run.seed ? json(*run.seed) : json(nullptr)},
                 {"wall_time_s", io::round12(seconds)},
                 {"outputs", json::array({run.output.empty() ? "stdout" : run.output})},
                 {"warnings", run.warnings}};
  std::cerr << report.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bellbound: bounded-dimension quantum correlation toolkit"};
  app.require_subcommand(1);
  Options o;
  Run run;
  std::function<void(const Options&, Run&)> action;

  auto add = [&](const std::string& name, const std::string& help,
                 std::function<void(const Options&, Run&)> fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-o,--output", o.output, "write the JSON artifact here instead of stdout");
    sub->callback([&, name, fn] {
      run.command = name;
      action = fn;
    });
    return sub;
  };
  auto need_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "RNG seed")->required();
    sub->add_option("--restarts", o.restarts, "independent seesaw restarts")->check(CLI::PositiveNumber);
    sub->add_option("--max-iterations", o.max_iterations)->check(CLI::PositiveNumber);
    sub->add_option("--tolerance", o.tolerance, "stop when a sweep gains less")->check(CLI::PositiveNumber);
    sub->add_option("--threads", o.threads, "worker threads (default BELLBOUND_THREADS)");
  };

  add("affdim", "affine dimension of a scenario", cmd_affdim)
      ->add_option("scenario", o.scenario_file)->required();
  {
    auto* sub = add("vertices", "enumerate deterministic local behaviors", cmd_vertices);
    sub->add_option("scenario", o.scenario_file)->required();
    sub->add_option("--cap", o.cap, "maximum vertex count");
  }
  {
    auto* sub = add("member", "local polytope membership", cmd_member);
    sub->add_option("behavior", o.behavior_file)->required();
    sub->add_option("--cap", o.cap, "maximum vertex count");
  }
  add("validate", "normalization, positivity and no-signaling residuals", cmd_validate)
      ->add_option("behavior", o.behavior_file)->required();
  add("born", "behavior of a quantum realization", cmd_born)
      ->add_option("realization", o.realization_file)->required();
  {
    auto* sub = add("compress", "Schmidt compression of a realization", cmd_compress);
    sub->add_option("realization", o.realization_file)->required();
    sub->add_option("--party", o.party, "last: compress the last party; 2: both parties of a bipartite realization")
        ->check(CLI::IsMember({"auto", "last", "2"}));
  }
  {
    auto* sub = add("seesaw", "maximize a Bell functional at fixed dimensions", cmd_seesaw);
    sub->add_option("functional", o.functional_file)->required();
    sub->add_option("--dims", o.dims, "comma-separated local dimensions (default: preset caps)");
    sub->add_flag("--trace", o.trace, "include per-half-step objective traces");
    need_seed(sub);
  }
  {
    auto* sub = add("sweep", "seesaw value against a common local dimension", cmd_sweep);
    sub->add_option("functional", o.functional_file)->required();
    sub->add_option("--max-dim", o.max_dim)->check(CLI::PositiveNumber);
    sub->add_option("--cap", o.cap, "maximum vertex count");
    need_seed(sub);
  }
  {
    auto* sub = add("decompose", "Carathéodory decomposition over generators", cmd_decompose);
    sub->add_option("target", o.target_file)->required();
    sub->add_option("generators", o.generators_file)->required();
  }
  {
    auto* sub = add("realize", "single realization of a hull point of generators", cmd_realize);
    sub->add_option("target", o.target_file)->required();
    sub->add_option("generators", o.generators_file)->required();
  }
  add("realize-mixture", "block-diagonal realization of a weighted mixture", cmd_realize_mixture)
      ->add_option("parts", o.parts_file)->required();
  {
    auto* sub = add("dstar", "dimensions sufficient for every correlation", cmd_dstar);
    sub->add_option("--scenario", o.scenario_file)->required();
    sub->add_option("--dims", o.dims, "extremal dimension caps (default: preset caps)");
    sub->add_option("--bound", o.bound, "override the Carathéodory number");
    sub->add_flag("--generic", o.generic, "use affine dimension + 1");
  }
  add("interrupt", "maximal interruption of a causal scenario", cmd_interrupt)
      ->add_option("causal", o.causal_file)->required();
  {
    auto* sub = add("project", "project an interrupted behavior onto its Bell+ scenario", cmd_project);
    sub->add_option("behavior", o.behavior_file)->required();
    sub->add_option("map", o.map_file)->required();
  }
  add("bounds", "dimension caps for a causal scenario", cmd_bounds)
      ->add_option("causal", o.causal_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  const auto start = std::chrono::steady_clock::now();
  run.output = o.output;
  int code = kExitOk;
  try {
    action(o, run);
    if (o.output.empty()) {
      std::cout << io::dump(run.artifact);
    } else {
      io::write_file(o.output, run.artifact);
    }
  } catch (const bellbound::NotInHullError& e) {
    json error = {{"error", std::string(bellbound::to_string(e.kind()))},
                  {"message", e.what()},
                  {"witness", io::to_json(e.witness())}};
    std::cout << io::dump(error);
    code = kExitValidation;
  } catch (const bellbound::Error& e) {
    json error = {{"error", std::string(bellbound::to_string(e.kind()))}, {"message", e.what()}};
    std::cout << io::dump(error);
    code = kExitValidation;
  } catch (const std::exception& e) {
    json error = {{"error", "Internal"}, {"message", e.what()}};
    std::cout << io::dump(error);
    code = kExitInternal;
  }
  if (code != kExitOk) run.warnings.push_back("failed with exit code " + std::to_string(code));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit_report(run, seconds);
  return code;
}

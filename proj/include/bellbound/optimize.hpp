#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bellbound/quantum.hpp"
#include "bellbound/scenario.hpp"

namespace bellbound {

/// Linear functional f(P) = sum c(a|x) P(a|x) + offset, coefficients in the
/// Behavior layout.
struct BellFunctional {
  Scenario scenario;
  Eigen::VectorXd coefficients;
  double offset = 0;
};

struct SeesawConfig {
  int restarts = 32;
  int max_iterations = 500;
  double tolerance = 1e-10;  // stop when a full sweep gains less than this
  std::uint64_t seed = 0;
  int threads = 0;           // 0: BELLBOUND_THREADS or hardware concurrency
  bool record_trace = false;
};

struct SeesawRun {
  double value = 0;
  int iterations = 0;
  bool converged = false;
  /// Objective after every half-step (state update, then one per party),
  /// starting with the value of the initial point.
  std::vector<double> trace;
};

struct SeesawResult {
  double value = 0;
  QuantumRealization realization;
  Behavior behavior;
  int iterations = 0;
  bool converged = false;
  int best_restart = 0;
  std::vector<SeesawRun> runs;
};

struct ClassicalMaximum {
  double value = 0;
  Behavior vertex;
  std::size_t vertex_index = 0;
};

double functional_value(const BellFunctional& f, const Behavior& b);

ClassicalMaximum classical_maximize(const BellFunctional& f,
                                    std::uint64_t cap = kDefaultVertexCap);

/// sum_{a,x} c(a|x) ⊗_i M_{a_i|x_i}, without the offset.
MatrixXcd bell_operator(const BellFunctional& f, const QuantumRealization& r);

/// Alternating maximization from a given pure starting point; `r` is updated
/// in place and holds the final realization.
SeesawRun seesaw_refine(const BellFunctional& f, QuantumRealization& r,
                        const SeesawConfig& cfg);

/// Best of cfg.restarts seesaw runs from random_realization starts; restart i
/// draws from the stream (cfg.seed, i).
SeesawResult seesaw_maximize(const BellFunctional& f, std::span<const Index> dims,
                             const SeesawConfig& cfg);

/// (2, ..., 2, 2^{N-1}) when the first N-1 parties each have exactly two
/// binary settings; throws NotApplicable otherwise.
std::vector<Index> preset_dimension_caps(const Scenario& s);

/// Thread count from BELLBOUND_THREADS, else hardware concurrency (>= 1).
int default_thread_count();

}  // namespace bellbound

#include "bellbound/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace bellbound {

namespace {

void check_functional(const BellFunctional& f) {
  if (f.coefficients.size() != f.scenario.behavior_size()) {
    throw Error(ErrorKind::ShapeMismatch, "functional coefficients do not match scenario");
  }
}

// Tr[M F] for Hermitian M, F.
double trace_product(const MatrixXcd& m, const MatrixXcd& f) {
  return m.cwiseProduct(f.transpose()).sum().real();
}

double setting_score(const Povm& povm, const std::vector<MatrixXcd>& effective) {
  double total = 0;
  for (int a = 0; a < povm.outcome_count(); ++a) {
    total += trace_product(povm.effects[a], effective[a]);
  }
  return total;
}

// Assign each basis vector to the outcome whose effective operator has the
// largest expectation on it (ties to the lowest outcome).
Povm greedy_assignment(const MatrixXcd& basis, const std::vector<MatrixXcd>& effective) {
  const Index d = basis.rows();
  const int k = static_cast<int>(effective.size());
  Povm povm;
  povm.effects.assign(k, MatrixXcd::Zero(d, d));
  for (Index j = basis.cols() - 1; j >= 0; --j) {
    const VectorXcd e = basis.col(j);
    int owner = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a) {
      const double v = e.dot(effective[a] * e).real();
      if (v > best) {
        best = v;
        owner = a;
      }
    }
    povm.effects[owner] += e * e.adjoint();
  }
  return povm;
}

// Exact re-split of outcomes a and b inside the range of M_a + M_b: project
// onto the positive eigenspace of F_a - F_b restricted there. Requires the
// pair to be projective; returns false and leaves povm alone otherwise.
bool refine_pair(Povm& povm, const std::vector<MatrixXcd>& effective, int a, int b) {
  const MatrixXcd sum = hermitize(povm.effects[a] + povm.effects[b]);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sum);
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::vector<Index> support;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > 1e-8 && ev(i) < 1 - 1e-8) return false;
    if (ev(i) >= 0.5) support.push_back(i);
  }
  if (support.empty()) return false;
  MatrixXcd q(sum.rows(), static_cast<Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) q.col(c) = es.eigenvectors().col(support[c]);

  const MatrixXcd g = hermitize(q.adjoint() * (effective[a] - effective[b]) * q);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> split(g);
  MatrixXcd ma = MatrixXcd::Zero(sum.rows(), sum.cols());
  for (Index i = g.rows() - 1; i >= 0; --i) {
    if (split.eigenvalues()(i) <= 0) break;
    const VectorXcd v = q * split.eigenvectors().col(i);
    ma += v * v.adjoint();
  }
  povm.effects[a] = hermitize(ma);
  povm.effects[b] = hermitize(MatrixXcd(q * q.adjoint() - ma));
  return true;
}

Povm update_setting(const Povm& current, const std::vector<MatrixXcd>& effective) {
  const int k = current.outcome_count();
  if (k < 2) return current;

  Povm best = current;
  double best_score = setting_score(current, effective);
  for (int c = 0; c < k; ++c) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(effective[c]);
    Povm candidate = sanitize_povm(greedy_assignment(es.eigenvectors(), effective));
    const double score = setting_score(candidate, effective);
    if (score > best_score) {
      best_score = score;
      best = std::move(candidate);
    }
  }
  for (int sweep = 0; sweep < 64; ++sweep) {
    bool improved = false;
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        Povm candidate = best;
        if (!refine_pair(candidate, effective, a, b)) continue;
        candidate = sanitize_povm(candidate);
        const double score = setting_score(candidate, effective);
        if (score > best_score + 1e-15) {
          best_score = score;
          best = std::move(candidate);
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return best;
}

// F[x_p][a_p] with f = sum_{x_p, a_p} Tr[M^p_{a_p|x_p} F[x_p][a_p]] + offset at
// the current state and the other parties' measurements.
std::vector<std::vector<MatrixXcd>> effective_operators(const BellFunctional& f,
                                                        const QuantumRealization& r,
                                                        const VectorXcd& psi, int party) {
  const Scenario& s = f.scenario;
  const int n = s.party_count();
  const Index d = r.dims[party];
  std::vector<std::vector<MatrixXcd>> out(s.setting_count(party));
  for (int x = 0; x < s.setting_count(party); ++x) {
    out[x].assign(s.outcome_count(party, x), MatrixXcd::Zero(d, d));
  }
  s.for_each_entry([&](const std::vector<int>& x, const std::vector<int>& a, Index idx) {
    const double c = f.coefficients[idx];
    if (c == 0) return;
    VectorXcd phi = psi;
    for (int j = 0; j < n; ++j) {
      if (j != party) phi = apply_local(r.measurements[j][x[j]].effects[a[j]], j, r.dims, phi);
    }
    out[x[party]][a[party]] += c * reduced_outer(phi, psi, r.dims, party);
  });
  for (auto& per_setting : out) {
    for (auto& m : per_setting) m = hermitize(m);
  }
  return out;
}

}  // namespace

double functional_value(const BellFunctional& f, const Behavior& b) {
  check_functional(f);
  if (!(f.scenario == b.scenario)) {
    throw Error(ErrorKind::ShapeMismatch, "functional and behavior use different scenarios");
  }
  return f.coefficients.dot(b.values) + f.offset;
}

ClassicalMaximum classical_maximize(const BellFunctional& f, std::uint64_t cap) {
  check_functional(f);
  auto vertices = enumerate_local_vertices(f.scenario, cap);
  ClassicalMaximum best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const double v = functional_value(f, vertices[i]);
    if (v > best.value) {
      best.value = v;
      best.vertex_index = i;
    }
  }
  best.vertex = std::move(vertices[best.vertex_index]);
  return best;
}

MatrixXcd bell_operator(const BellFunctional& f, const QuantumRealization& r) {
  check_functional(f);
  const Scenario& s = f.scenario;
  const int n = s.party_count();
  const Index total = product(r.dims);
  MatrixXcd w = MatrixXcd::Zero(total, total);
  std::vector<MatrixXcd> factors(n);
  s.for_each_entry([&](const std::vector<int>& x, const std::vector<int>& a, Index idx) {
    const double c = f.coefficients[idx];
    if (c == 0) return;
    for (int p = 0; p < n; ++p) factors[p] = r.measurements[p][x[p]].effects[a[p]];
    w += c * kron_all<cplx>(factors);
  });
  return hermitize(w);
}

SeesawRun seesaw_refine(const BellFunctional& f, QuantumRealization& r,
                        const SeesawConfig& cfg) {
  check_functional(f);
  if (!(f.scenario == r.scenario)) {
    throw Error(ErrorKind::ScenarioMismatch, "functional and realization use different scenarios");
  }
  const int n = f.scenario.party_count();
  SeesawRun run;
  double value = functional_value(f, born_evaluate(r));
  run.trace.push_back(value);

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double sweep_start = value;

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(bell_operator(f, r));
    const Index top = es.eigenvalues().size() - 1;
    VectorXcd psi = es.eigenvectors().col(top).normalized();
    value = es.eigenvalues()(top) + f.offset;
    run.trace.push_back(value);
    r.state = StateVector{r.dims, psi};

    for (int p = 0; p < n; ++p) {
      const auto effective = effective_operators(f, r, psi, p);
      double total = f.offset;
      for (int x = 0; x < f.scenario.setting_count(p); ++x) {
        r.measurements[p][x] = update_setting(r.measurements[p][x], effective[x]);
        total += setting_score(r.measurements[p][x], effective[x]);
      }
      value = total;
      run.trace.push_back(value);
    }

    run.iterations = it + 1;
    if (value - sweep_start <= cfg.tolerance) {
      run.converged = true;
      break;
    }
  }
  run.value = value;
  if (!cfg.record_trace) run.trace.clear();
  return run;
}

SeesawResult seesaw_maximize(const BellFunctional& f, std::span<const Index> dims,
                             const SeesawConfig& cfg) {
  check_functional(f);
  if (cfg.restarts < 1 || cfg.max_iterations < 1 || cfg.tolerance <= 0) {
    throw Error(ErrorKind::InvalidArgument, "seesaw config values must be positive");
  }
  const int restarts = cfg.restarts;
  std::vector<SeesawRun> runs(restarts);
  std::vector<QuantumRealization> finals(restarts);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < restarts; i = next++) {
      try {
        auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(i));
        QuantumRealization r = random_realization(f.scenario, dims, rng);
        runs[i] = seesaw_refine(f, r, cfg);
        finals[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(cfg.threads > 0 ? cfg.threads : default_thread_count(), 1, restarts);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  int best = 0;
  for (int i = 1; i < restarts; ++i) {
    if (runs[i].value > runs[best].value) best = i;
  }
  SeesawResult result;
  result.best_restart = best;
  result.realization = std::move(finals[best]);
  result.behavior = born_evaluate(result.realization);
  result.value = functional_value(f, result.behavior);
  result.iterations = runs[best].iterations;
  result.converged = runs[best].converged;
  result.runs = std::move(runs);
  return result;
}

std::vector<Index> preset_dimension_caps(const Scenario& s) {
  const int n = s.party_count();
  for (int p = 0; p + 1 < n; ++p) {
    const auto& party = s.outcomes()[p];
    if (party.size() != 2 || party[0] != 2 || party[1] != 2) {
      throw Error(ErrorKind::NotApplicable,
                  "party " + std::to_string(p) +
                      " does not have exactly two binary settings; supply dims manually");
    }
  }
  std::vector<Index> caps(n, 2);
  caps[n - 1] = Index{1} << (n - 1);
  return caps;
}

int default_thread_count() {
  if (const char* env = std::getenv("BELLBOUND_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace bellbound

#include "bellbound/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bellbound {

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

double min_eigenvalue(const MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

void check_state(const StateVector& psi, double tol) {
  if (psi.dims.empty()) fail(ErrorKind::DimensionMismatch, "state has no tensor factors");
  for (Index d : psi.dims) {
    if (d < 1) fail(ErrorKind::DimensionMismatch, "local dimensions must be positive");
  }
  if (psi.amplitudes.size() != product(psi.dims)) {
    fail(ErrorKind::DimensionMismatch, "amplitude count does not match dims");
  }
  if (std::abs(psi.amplitudes.norm() - 1.0) > tol) {
    fail(ErrorKind::InvalidArgument, "state vector is not normalized");
  }
}

void check_state(const DensityOperator& rho, double tol) {
  const MatrixXcd& m = rho.matrix;
  if (m.rows() != m.cols() || m.rows() < 1) {
    fail(ErrorKind::DimensionMismatch, "density operator must be square");
  }
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) {
    fail(ErrorKind::InvalidArgument, "density operator is not Hermitian");
  }
  if (std::abs(m.trace() - cplx(1.0)) > tol) {
    fail(ErrorKind::InvalidArgument, "density operator does not have unit trace");
  }
  if (min_eigenvalue(m) < -tol) {
    fail(ErrorKind::InvalidArgument, "density operator is not positive semidefinite");
  }
}

void check_povm(const Povm& povm, double tol) {
  if (povm.effects.empty()) fail(ErrorKind::InvalidArgument, "POVM has no effects");
  const Index d = povm.dim();
  MatrixXcd total = MatrixXcd::Zero(d, d);
  for (const auto& e : povm.effects) {
    if (e.rows() != d || e.cols() != d) {
      fail(ErrorKind::DimensionMismatch, "POVM effects have inconsistent sizes");
    }
    if ((e - e.adjoint()).cwiseAbs().maxCoeff() > tol) {
      fail(ErrorKind::InvalidArgument, "POVM effect is not Hermitian");
    }
    if (min_eigenvalue(e) < -tol) {
      fail(ErrorKind::InvalidArgument, "POVM effect is not positive semidefinite");
    }
    total += e;
  }
  if ((total - MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() > tol) {
    fail(ErrorKind::InvalidArgument, "POVM effects do not sum to identity");
  }
}

void check_realization(const QuantumRealization& r, double tol) {
  const Scenario& s = r.scenario;
  const int n = s.party_count();
  if (static_cast<int>(r.dims.size()) != n) {
    fail(ErrorKind::DimensionMismatch, "dims must list one dimension per party");
  }
  for (Index d : r.dims) {
    if (d < 1) fail(ErrorKind::DimensionMismatch, "local dimensions must be positive");
  }
  const Index total = product(r.dims);
  if (const auto* psi = std::get_if<StateVector>(&r.state)) {
    check_state(*psi, tol);
    if (psi->amplitudes.size() != total) {
      fail(ErrorKind::DimensionMismatch, "state dimension differs from prod(dims)");
    }
  } else {
    const auto& rho = std::get<DensityOperator>(r.state);
    check_state(rho, tol);
    if (rho.dim() != total) {
      fail(ErrorKind::DimensionMismatch, "state dimension differs from prod(dims)");
    }
  }
  if (static_cast<int>(r.measurements.size()) != n) {
    fail(ErrorKind::DimensionMismatch, "measurements must be given for every party");
  }
  for (int p = 0; p < n; ++p) {
    if (static_cast<int>(r.measurements[p].size()) != s.setting_count(p)) {
      fail(ErrorKind::DimensionMismatch,
           "party " + std::to_string(p) + " has wrong number of settings");
    }
    for (int x = 0; x < s.setting_count(p); ++x) {
      const Povm& povm = r.measurements[p][x];
      if (povm.outcome_count() != s.outcome_count(p, x)) {
        fail(ErrorKind::DimensionMismatch,
             "party " + std::to_string(p) + " setting " + std::to_string(x) +
                 ": outcome count does not match scenario");
      }
      check_povm(povm, tol);
      if (povm.dim() != r.dims[p]) {
        fail(ErrorKind::DimensionMismatch,
             "party " + std::to_string(p) + ": effect size differs from local dimension");
      }
    }
  }
}

MatrixXcd density_matrix(const QuantumState& state) {
  if (const auto* psi = std::get_if<StateVector>(&state)) {
    return psi->amplitudes * psi->amplitudes.adjoint();
  }
  return std::get<DensityOperator>(state).matrix;
}

Behavior born_evaluate(const QuantumRealization& r) {
  check_realization(r);
  const Scenario& s = r.scenario;
  const int n = s.party_count();
  Eigen::VectorXd values(s.behavior_size());

  if (const auto* psi = std::get_if<StateVector>(&r.state)) {
    const VectorXcd& v = psi->amplitudes;
    s.for_each_entry([&](const std::vector<int>& x, const std::vector<int>& a, Index idx) {
      VectorXcd phi = v;
      for (int p = 0; p < n; ++p) {
        phi = apply_local(r.measurements[p][x[p]].effects[a[p]], p, r.dims, phi);
      }
      values[idx] = v.dot(phi).real();
    });
  } else {
    const MatrixXcd& rho = std::get<DensityOperator>(r.state).matrix;
    std::vector<MatrixXcd> factors(n);
    s.for_each_entry([&](const std::vector<int>& x, const std::vector<int>& a, Index idx) {
      for (int p = 0; p < n; ++p) factors[p] = r.measurements[p][x[p]].effects[a[p]];
      const MatrixXcd op = kron_all<cplx>(factors);
      values[idx] = rho.transpose().cwiseProduct(op).sum().real();
    });
  }
  return Behavior(s, std::move(values));
}

StateVector purify(const DensityOperator& rho) {
  check_state(rho);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(rho.matrix));
  const Index d = rho.dim();
  std::vector<Index> kept;
  for (Index i = d - 1; i >= 0; --i) {
    if (es.eigenvalues()(i) > 1e-12) kept.push_back(i);
  }
  const Index r = static_cast<Index>(kept.size());
  StateVector out;
  out.dims = {d, r};
  out.amplitudes = VectorXcd::Zero(d * r);
  for (Index k = 0; k < r; ++k) {
    const double weight = std::sqrt(es.eigenvalues()(kept[k]));
    const VectorXcd e = es.eigenvectors().col(kept[k]);
    for (Index i = 0; i < d; ++i) out.amplitudes(i * r + k) = weight * e(i);
  }
  out.amplitudes.normalize();
  return out;
}

QuantumRealization purify_into(const QuantumRealization& r, int party, Index* ancilla_dim) {
  if (r.is_pure()) {
    if (ancilla_dim) *ancilla_dim = 1;
    return r;
  }
  check_realization(r);
  const int n = r.scenario.party_count();
  if (party < 0 || party >= n) fail(ErrorKind::InvalidArgument, "bad party index");

  const StateVector joint = purify(std::get<DensityOperator>(r.state));
  const Index anc = joint.dims[1];
  if (ancilla_dim) *ancilla_dim = anc;

  // Amplitudes arrive ordered (d_1..d_N, anc); move anc right after `party`.
  const Index before = product(std::span<const Index>(r.dims).first(party + 1));
  const Index after = product(std::span<const Index>(r.dims).subspan(party + 1));
  VectorXcd amps(joint.amplitudes.size());
  for (Index hi = 0; hi < before; ++hi) {
    for (Index lo = 0; lo < after; ++lo) {
      for (Index k = 0; k < anc; ++k) {
        amps((hi * anc + k) * after + lo) = joint.amplitudes((hi * after + lo) * anc + k);
      }
    }
  }

  QuantumRealization out = r;
  out.dims[party] *= anc;
  out.state = StateVector{out.dims, std::move(amps)};
  const MatrixXcd id = MatrixXcd::Identity(anc, anc);
  for (auto& povm : out.measurements[party]) {
    for (auto& e : povm.effects) {
      MatrixXcd grown = Eigen::kroneckerProduct(e, id);
      e.swap(grown);
    }
  }
  return out;
}

Povm sanitize_povm(const Povm& povm, double clip) {
  Povm out;
  const Index d = povm.dim();
  const int k = povm.outcome_count();
  MatrixXcd total = MatrixXcd::Zero(d, d);
  for (int a = 0; a + 1 < k; ++a) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(povm.effects[a]));
    Eigen::VectorXd ev = es.eigenvalues();
    for (Index i = 0; i < ev.size(); ++i) {
      if (ev(i) < 0 && ev(i) > -clip) ev(i) = 0;
    }
    MatrixXcd e = es.eigenvectors() * ev.cast<cplx>().asDiagonal() *
                  es.eigenvectors().adjoint();
    e = hermitize(e);
    total += e;
    out.effects.push_back(std::move(e));
  }
  if (k > 0) out.effects.push_back(hermitize(MatrixXcd(MatrixXcd::Identity(d, d) - total)));
  return out;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

MatrixXcd random_unitary(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  MatrixXcd g(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) g(i, j) = cplx(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(d, d);
  const MatrixXcd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (Index j = 0; j < d; ++j) {
    const cplx diag = rmat(j, j);
    if (std::abs(diag) > 0) q.col(j) *= diag / std::abs(diag);
  }
  return q;
}

VectorXcd random_unit_vector(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  VectorXcd v(d);
  for (Index i = 0; i < d; ++i) v(i) = cplx(normal(rng), normal(rng));
  return v.normalized();
}

Povm random_projective_povm(Index d, int outcomes, std::mt19937_64& rng) {
  const MatrixXcd u = random_unitary(d, rng);
  // Basis vectors are coarse-grained into outcomes; with more outcomes than
  // vectors some outcomes receive the zero effect.
  std::vector<int> owner(d);
  if (outcomes <= d) {
    std::uniform_int_distribution<int> pick(0, outcomes - 1);
    for (Index j = 0; j < d; ++j) owner[j] = j < outcomes ? static_cast<int>(j) : pick(rng);
    std::shuffle(owner.begin(), owner.end(), rng);
  } else {
    std::vector<int> labels(outcomes);
    std::iota(labels.begin(), labels.end(), 0);
    std::shuffle(labels.begin(), labels.end(), rng);
    for (Index j = 0; j < d; ++j) owner[j] = labels[j];
  }
  Povm povm;
  povm.effects.assign(outcomes, MatrixXcd::Zero(d, d));
  for (Index j = 0; j < d; ++j) povm.effects[owner[j]] += u.col(j) * u.col(j).adjoint();
  return sanitize_povm(povm);
}

QuantumRealization random_realization(const Scenario& s, std::span<const Index> dims,
                                      std::mt19937_64& rng) {
  if (static_cast<int>(dims.size()) != s.party_count()) {
    fail(ErrorKind::DimensionMismatch, "dims must list one dimension per party");
  }
  for (Index d : dims) {
    if (d < 1) fail(ErrorKind::DimensionMismatch, "local dimensions must be positive");
  }
  QuantumRealization r;
  r.scenario = s;
  r.dims.assign(dims.begin(), dims.end());
  r.state = StateVector{r.dims, random_unit_vector(product(dims), rng)};
  r.measurements.resize(s.party_count());
  for (int p = 0; p < s.party_count(); ++p) {
    for (int x = 0; x < s.setting_count(p); ++x) {
      r.measurements[p].push_back(random_projective_povm(dims[p], s.outcome_count(p, x), rng));
    }
  }
  return r;
}

QuantumRealization random_realization(const Scenario& s, std::span<const Index> dims,
                                      std::uint64_t seed) {
  auto rng = make_rng(seed);
  return random_realization(s, dims, rng);
}

}  // namespace bellbound

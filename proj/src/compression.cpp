#include "bellbound/compression.hpp"

#include <span>

namespace bellbound {

namespace {

struct Cut {
  Eigen::VectorXd coefficients;
  MatrixXcd left;
  MatrixXcd right;
};

// SVD of the (rows x cols) row-major reshape of amplitudes.
Cut schmidt_cut(const VectorXcd& amplitudes, Index rows, Index cols) {
  MatrixXcd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = amplitudes(i * cols + j);
  }
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > kSchmidtThreshold) ++rank;
  Cut cut;
  cut.coefficients = sv.head(rank);
  cut.left = svd.matrixU().leftCols(rank);
  // m = U S V^†, so the right Schmidt vectors are the conjugated columns of V.
  cut.right = svd.matrixV().leftCols(rank).conjugate();
  return cut;
}

}  // namespace

VectorXcd SchmidtData::reconstruct() const {
  VectorXcd out = VectorXcd::Zero(left.rows() * right.rows());
  for (Index i = 0; i < rank(); ++i) {
    out += coefficients(i) * Eigen::kroneckerProduct(left.col(i), right.col(i)).eval();
  }
  return out;
}

SchmidtData schmidt_decompose(const StateVector& psi) {
  if (psi.dims.size() != 2) {
    throw Error(ErrorKind::NotBipartite, "Schmidt decomposition needs exactly two factors");
  }
  check_state(psi);
  Cut cut = schmidt_cut(psi.amplitudes, psi.dims[0], psi.dims[1]);
  return SchmidtData{std::move(cut.coefficients), std::move(cut.left), std::move(cut.right)};
}

SchmidtProjector schmidt_projector(const SchmidtData& sd) {
  const Index dim = sd.left.rows() * sd.right.rows();
  SchmidtProjector out{MatrixXcd::Zero(dim, dim), sd.rank()};
  for (Index i = 0; i < sd.rank(); ++i) {
    const VectorXcd uv = Eigen::kroneckerProduct(sd.left.col(i), sd.right.col(i)).eval();
    out.matrix += uv * uv.adjoint();
  }
  return out;
}

Povm compress_povm(const Povm& povm, const MatrixXcd& basis) {
  if (basis.rows() != povm.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "compression basis does not fit POVM");
  }
  Povm out;
  out.effects.reserve(povm.effects.size());
  for (const auto& e : povm.effects) out.effects.push_back(basis.adjoint() * e * basis);
  return sanitize_povm(out);
}

CompressionResult compress_bipartite(const QuantumRealization& r) {
  if (r.scenario.party_count() != 2) {
    throw Error(ErrorKind::NotBipartite, "bipartite compression needs two parties");
  }
  check_realization(r);
  CompressionResult result;
  result.old_dims = r.dims;
  const QuantumRealization pure = purify_into(r, 1, &result.ancilla_dim);
  const auto& psi = std::get<StateVector>(pure.state);

  const SchmidtData sd = schmidt_decompose(StateVector{pure.dims, psi.amplitudes});
  const Index rank = sd.rank();

  QuantumRealization out;
  out.scenario = r.scenario;
  out.dims = {rank, rank};
  VectorXcd amps = VectorXcd::Zero(rank * rank);
  for (Index i = 0; i < rank; ++i) amps(i * rank + i) = sd.coefficients(i);
  amps.normalize();
  out.state = StateVector{out.dims, std::move(amps)};
  out.measurements.resize(2);
  for (const auto& povm : pure.measurements[0]) {
    out.measurements[0].push_back(compress_povm(povm, sd.left));
  }
  for (const auto& povm : pure.measurements[1]) {
    out.measurements[1].push_back(compress_povm(povm, sd.right));
  }
  result.realization = std::move(out);
  return result;
}

CompressionResult compress_last_party(const QuantumRealization& r) {
  const int n = r.scenario.party_count();
  if (n < 2) throw Error(ErrorKind::NotBipartite, "last-party compression needs N >= 2");
  check_realization(r);
  CompressionResult result;
  result.old_dims = r.dims;
  const QuantumRealization pure = purify_into(r, n - 1, &result.ancilla_dim);
  const auto& psi = std::get<StateVector>(pure.state);

  const Index group = product(std::span<const Index>(pure.dims).first(n - 1));
  const Index last = pure.dims[n - 1];
  const Cut cut = schmidt_cut(psi.amplitudes, group, last);
  const Index rank = cut.coefficients.size();

  QuantumRealization out = pure;
  out.dims[n - 1] = rank;
  VectorXcd amps(group * rank);
  for (Index g = 0; g < group; ++g) {
    for (Index i = 0; i < rank; ++i) amps(g * rank + i) = cut.coefficients(i) * cut.left(g, i);
  }
  amps.normalize();
  out.state = StateVector{out.dims, std::move(amps)};
  out.measurements[n - 1].clear();
  for (const auto& povm : pure.measurements[n - 1]) {
    out.measurements[n - 1].push_back(compress_povm(povm, cut.right));
  }
  result.realization = std::move(out);
  return result;
}

}  // namespace bellbound

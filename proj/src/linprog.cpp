#include "bellbound/linprog.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace bellbound::linprog {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

FeasibilityResult find_feasible(const MatrixXd& A_in, const VectorXd& b_in,
                                const SimplexOptions& options) {
  const Index m = A_in.rows();
  const Index n = A_in.cols();

  // Row signs are flipped so that b >= 0 and the artificial basis is feasible.
  MatrixXd A = A_in;
  VectorXd b = b_in;
  VectorXd sign = VectorXd::Ones(m);
  for (Index i = 0; i < m; ++i) {
    if (b(i) < 0) {
      A.row(i) *= -1.0;
      b(i) = -b(i);
      sign(i) = -1.0;
    }
  }

  // Columns [0, n) are structural, [n, n + m) artificial.
  std::vector<Index> basis(m);
  std::iota(basis.begin(), basis.end(), n);
  std::vector<char> in_basis(n + m, 0);
  for (Index k = 0; k < m; ++k) in_basis[n + k] = 1;

  auto column = [&](Index j) -> VectorXd {
    if (j < n) return A.col(j);
    return VectorXd::Unit(m, j - n);
  };
  auto cost = [&](Index j) { return j < n ? 0.0 : 1.0; };

  FeasibilityResult result;
  VectorXd xB = b;
  VectorXd y = VectorXd::Ones(m);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter;
    MatrixXd B(m, m);
    VectorXd cB(m);
    for (Index k = 0; k < m; ++k) {
      B.col(k) = column(basis[k]);
      cB(k) = cost(basis[k]);
    }
    Eigen::PartialPivLU<MatrixXd> lu(B);
    xB = lu.solve(b);
    y = lu.transpose().solve(cB);

    // Bland: lowest-index column with negative reduced cost enters.
    Index entering = -1;
    const VectorXd structural = A.transpose() * y;
    for (Index j = 0; j < n + m && entering < 0; ++j) {
      if (in_basis[j]) continue;
      const double reduced = j < n ? -structural(j) : 1.0 - y(j - n);
      if (reduced < -options.pricing_tolerance) entering = j;
    }
    if (entering < 0) break;

    const VectorXd d = lu.solve(column(entering));
    Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < m; ++k) {
      if (d(k) <= options.pivot_tolerance) continue;
      const double ratio = std::max(xB(k), 0.0) / d(k);
      if (leave < 0 || ratio < best - 1e-15) {
        best = ratio;
        leave = k;
      } else if (ratio <= best + 1e-15 && basis[k] < basis[leave]) {
        leave = k;
      }
    }
    // Phase one is bounded below by zero, so this only trips on breakdown.
    if (leave < 0) break;

    in_basis[basis[leave]] = 0;
    in_basis[entering] = 1;
    basis[leave] = entering;
  }

  double infeasibility = 0;
  result.x = VectorXd::Zero(n);
  for (Index k = 0; k < m; ++k) {
    const double value = std::max(xB(k), 0.0);
    if (basis[k] >= n) {
      infeasibility += value;
    } else {
      result.x(basis[k]) = value;
    }
  }
  result.infeasibility = infeasibility;
  result.feasible = infeasibility <= options.feasibility_tolerance;
  result.certificate = sign.cwiseProduct(y);
  return result;
}

}  // namespace bellbound::linprog

#pragma once

#include <Eigen/Dense>

namespace bellbound::linprog {

/// Outcome of a feasibility query A x = b, x >= 0.
///
/// When feasible, x is a basic feasible solution (at most rank(A) nonzeros).
/// When infeasible, certificate y satisfies A^T y <= 0 componentwise and
/// b^T y > 0 (Farkas alternative); y is the optimal phase-one dual, bounded
/// by 1 in each component after sign normalization.
struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd x;
  Eigen::VectorXd certificate;
  double infeasibility = 0;  // optimal phase-one objective (sum of artificials)
  int iterations = 0;
};

struct SimplexOptions {
  double feasibility_tolerance = 1e-8;
  double pricing_tolerance = 1e-11;
  double pivot_tolerance = 1e-11;
  int max_iterations = 100000;
};

/// Phase-one revised simplex with Bland's rule. Dense; meant for at most a
/// few hundred rows and some thousands of columns.
FeasibilityResult find_feasible(const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& b,
                                const SimplexOptions& options = {});

}  // namespace bellbound::linprog

#include "bellbound/convexify.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bellbound/linprog.hpp"

namespace bellbound {

namespace {

void normalize_weights(ConvexDecomposition& d) {
  double total = 0;
  for (double& w : d.weights) {
    w = std::max(w, 0.0);
    total += w;
  }
  for (double& w : d.weights) w /= total;
}

}  // namespace

std::int64_t caratheodory_bound(const Scenario& s, bool assume_connected) {
  const std::int64_t dim = affine_dimension(s);
  return assume_connected ? dim : dim + 1;
}

ConvexDecomposition caratheodory_reduce(ConvexDecomposition d) {
  while (d.components.size() > 1) {
    const Index k = static_cast<Index>(d.components.size());
    const Index len = d.components.front().values.size();
    Eigen::MatrixXd m(len + 1, k);
    for (Index j = 0; j < k; ++j) {
      m.col(j).head(len) = d.components[j].values;
      m(len, j) = 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = 1e-10 * std::max(1.0, sv(0));
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    if (rank == k) break;

    // z spans part of the null space: sum_j z_j = 0 and sum_j z_j v_j = 0, so
    // moving the weights along -z keeps the mixture fixed.
    Eigen::VectorXd z = svd.matrixV().col(k - 1);
    if (z.maxCoeff() <= 0) z = -z;
    Index drop = -1;
    double step = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < k; ++j) {
      if (z(j) <= 1e-14) continue;
      const double ratio = d.weights[j] / z(j);
      if (ratio < step) {
        step = ratio;
        drop = j;
      }
    }
    if (drop < 0) break;

    ConvexDecomposition next;
    next.target = d.target;
    for (Index j = 0; j < k; ++j) {
      const double w = d.weights[j] - step * z(j);
      if (j == drop || w <= 1e-15) continue;
      next.weights.push_back(w);
      next.components.push_back(std::move(d.components[j]));
      next.generator_indices.push_back(d.generator_indices[j]);
    }
    normalize_weights(next);
    d = std::move(next);
  }
  return d;
}

ConvexDecomposition decompose(const Behavior& target, std::span<const Behavior> generators) {
  if (generators.empty()) {
    throw Error(ErrorKind::InvalidArgument, "decompose needs at least one generator");
  }
  for (const auto& g : generators) {
    if (!(g.scenario == target.scenario)) {
      throw Error(ErrorKind::ScenarioMismatch, "generator scenario differs from target");
    }
  }
  const Index len = target.values.size();
  const Index n = static_cast<Index>(generators.size());
  Eigen::MatrixXd a(len + 1, n);
  for (Index j = 0; j < n; ++j) {
    a.col(j).head(len) = generators[j].values;
    a(len, j) = 1.0;
  }
  Eigen::VectorXd rhs(len + 1);
  rhs.head(len) = target.values;
  rhs(len) = 1.0;

  const auto lp = linprog::find_feasible(a, rhs);
  if (!lp.feasible) {
    Witness witness;
    witness.coefficients = lp.certificate.head(len);
    const double scale = witness.coefficients.cwiseAbs().maxCoeff();
    if (scale > 0) witness.coefficients /= scale;
    witness.behavior_value = witness.coefficients.dot(target.values);
    witness.local_bound = -std::numeric_limits<double>::infinity();
    for (const auto& g : generators) {
      witness.local_bound = std::max(witness.local_bound, witness.coefficients.dot(g.values));
    }
    throw NotInHullError("target is not in the convex hull of the generators (infeasibility " +
                             std::to_string(lp.infeasibility) + ")",
                         std::move(witness));
  }

  ConvexDecomposition d;
  d.target = target;
  for (Index j = 0; j < n; ++j) {
    if (lp.x(j) <= 0) continue;
    d.weights.push_back(lp.x(j));
    d.components.push_back(generators[j]);
    d.generator_indices.push_back(static_cast<std::size_t>(j));
  }
  normalize_weights(d);
  return caratheodory_reduce(std::move(d));
}

std::vector<Index> ancilla_dimension(std::span<const Index> dims, const Scenario& s,
                                     std::optional<std::int64_t> bound_override) {
  if (static_cast<int>(dims.size()) != s.party_count()) {
    throw Error(ErrorKind::DimensionMismatch, "dims must list one dimension per party");
  }
  const std::int64_t k = bound_override ? *bound_override : caratheodory_bound(s, true);
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "Carathéodory bound must be positive");
  std::vector<Index> out;
  for (Index d : dims) out.push_back(d * k);
  return out;
}

QuantumRealization mixture_realization(std::span<const WeightedRealization> parts) {
  if (parts.empty()) throw Error(ErrorKind::WeightError, "mixture needs at least one part");
  const Scenario& s = parts.front().realization.scenario;
  double total = 0;
  for (const auto& part : parts) {
    if (!(part.realization.scenario == s)) {
      throw Error(ErrorKind::ScenarioMismatch, "mixture parts use different scenarios");
    }
    if (!(part.weight >= -1e-12)) throw Error(ErrorKind::WeightError, "negative mixture weight");
    total += part.weight;
    check_realization(part.realization);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorKind::WeightError, "mixture weights sum to " + std::to_string(total));
  }
  if (parts.size() == 1) return parts.front().realization;

  const int n = s.party_count();
  const std::size_t k = parts.size();
  std::vector<Index> dims(n, 0);
  std::vector<std::vector<Index>> offsets(k, std::vector<Index>(n));
  for (std::size_t c = 0; c < k; ++c) {
    for (int p = 0; p < n; ++p) {
      offsets[c][p] = dims[p];
      dims[p] += parts[c].realization.dims[p];
    }
  }
  const Index total_dim = product(dims);

  MatrixXcd rho = MatrixXcd::Zero(total_dim, total_dim);
  for (std::size_t c = 0; c < k; ++c) {
    const auto& part = parts[c].realization;
    const Index local_dim = product(part.dims);
    // Flat index in the part's space -> flat index in the direct-sum space.
    std::vector<Index> to_global(local_dim);
    for (Index i = 0; i < local_dim; ++i) {
      Index rem = i, global = 0, stride = 1;
      for (int p = n - 1; p >= 0; --p) {
        const Index digit = rem % part.dims[p];
        rem /= part.dims[p];
        global += (offsets[c][p] + digit) * stride;
        stride *= dims[p];
      }
      to_global[i] = global;
    }
    const MatrixXcd local_rho = density_matrix(part.state);
    for (Index col = 0; col < local_dim; ++col) {
      for (Index row = 0; row < local_dim; ++row) {
        rho(to_global[row], to_global[col]) += parts[c].weight * local_rho(row, col);
      }
    }
  }

  QuantumRealization out;
  out.scenario = s;
  out.dims = dims;
  out.state = DensityOperator{hermitize(rho)};
  out.measurements.resize(n);
  for (int p = 0; p < n; ++p) {
    for (int x = 0; x < s.setting_count(p); ++x) {
      Povm povm;
      for (int a = 0; a < s.outcome_count(p, x); ++a) {
        MatrixXcd e = MatrixXcd::Zero(dims[p], dims[p]);
        for (std::size_t c = 0; c < k; ++c) {
          const Index d = parts[c].realization.dims[p];
          e.block(offsets[c][p], offsets[c][p], d, d) =
              parts[c].realization.measurements[p][x].effects[a];
        }
        povm.effects.push_back(std::move(e));
      }
      out.measurements[p].push_back(sanitize_povm(povm));
    }
  }
  return out;
}

QuantumRealization realize_nonextremal(const Behavior& target,
                                       std::span<const Generator> generators) {
  std::vector<Behavior> behaviors;
  behaviors.reserve(generators.size());
  for (const auto& g : generators) behaviors.push_back(g.behavior);
  const ConvexDecomposition d = decompose(target, behaviors);

  std::vector<WeightedRealization> parts;
  for (std::size_t i = 0; i < d.weights.size(); ++i) {
    parts.push_back({d.weights[i], generators[d.generator_indices[i]].realization});
  }
  return mixture_realization(parts);
}

}  // namespace bellbound

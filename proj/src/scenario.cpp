#include "bellbound/scenario.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "bellbound/linprog.hpp"

namespace bellbound {

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

// Deterministic strategies of one party, lexicographic with setting 0 slowest.
std::vector<std::vector<int>> party_strategies(const std::vector<int>& outcomes) {
  std::vector<std::vector<int>> out;
  std::vector<int> s(outcomes.size(), 0);
  while (true) {
    out.push_back(s);
    int j = static_cast<int>(s.size()) - 1;
    for (; j >= 0; --j) {
      if (++s[j] < outcomes[j]) break;
      s[j] = 0;
    }
    if (j < 0) break;
  }
  return out;
}

}  // namespace

Scenario::Scenario(std::vector<std::vector<int>> outcomes)
    : outcomes_(std::move(outcomes)) {
  if (outcomes_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "scenario needs at least one party");
  }
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (outcomes_[i].empty()) {
      throw Error(ErrorKind::InvalidArgument,
                  "party " + std::to_string(i) + " has no settings");
    }
    for (int k : outcomes_[i]) {
      if (k < 1) {
        throw Error(ErrorKind::InvalidArgument,
                    "outcome counts must be positive (party " +
                        std::to_string(i) + ")");
      }
    }
  }

  const int n = party_count();
  std::vector<int> x(n, 0);
  block_offsets_.assign(1, 0);
  while (true) {
    Index size = 1;
    for (int p = 0; p < n; ++p) size *= outcomes_[p][x[p]];
    block_offsets_.push_back(block_offsets_.back() + size);
    int p = n - 1;
    for (; p >= 0; --p) {
      if (++x[p] < setting_count(p)) break;
      x[p] = 0;
    }
    if (p < 0) break;
  }
}

Index Scenario::setting_index(std::span<const int> settings) const {
  if (static_cast<int>(settings.size()) != party_count()) {
    throw Error(ErrorKind::ShapeMismatch, "setting tuple has wrong arity");
  }
  Index idx = 0;
  for (int p = 0; p < party_count(); ++p) {
    if (settings[p] < 0 || settings[p] >= setting_count(p)) {
      throw Error(ErrorKind::ShapeMismatch, "setting out of range");
    }
    idx = idx * setting_count(p) + settings[p];
  }
  return idx;
}

std::vector<int> Scenario::settings_of(Index joint_setting) const {
  std::vector<int> x(party_count());
  for (int p = party_count() - 1; p >= 0; --p) {
    x[p] = static_cast<int>(joint_setting % setting_count(p));
    joint_setting /= setting_count(p);
  }
  return x;
}

Index Scenario::index(std::span<const int> settings,
                      std::span<const int> outcomes) const {
  const Index js = setting_index(settings);
  if (static_cast<int>(outcomes.size()) != party_count()) {
    throw Error(ErrorKind::ShapeMismatch, "outcome tuple has wrong arity");
  }
  Index local = 0;
  for (int p = 0; p < party_count(); ++p) {
    const int k = outcomes_[p][settings[p]];
    if (outcomes[p] < 0 || outcomes[p] >= k) {
      throw Error(ErrorKind::ShapeMismatch, "outcome out of range");
    }
    local = local * k + outcomes[p];
  }
  return block_offsets_[js] + local;
}

Behavior::Behavior(Scenario s, Eigen::VectorXd v)
    : scenario(std::move(s)), values(std::move(v)) {
  if (values.size() != scenario.behavior_size()) {
    throw Error(ErrorKind::ShapeMismatch,
                "behavior has " + std::to_string(values.size()) +
                    " entries, scenario expects " +
                    std::to_string(scenario.behavior_size()));
  }
}

std::int64_t affine_dimension(const Scenario& s) {
  std::int64_t product = 1;
  for (const auto& party : s.outcomes()) {
    std::int64_t free_params = 1;
    for (int k : party) free_params += k - 1;
    product *= free_params;
  }
  return product - 1;
}

std::uint64_t local_vertex_count(const Scenario& s) {
  std::uint64_t count = 1;
  for (const auto& party : s.outcomes()) {
    for (int k : party) count = saturating_mul(count, static_cast<std::uint64_t>(k));
  }
  return count;
}

std::vector<Behavior> enumerate_local_vertices(const Scenario& s,
                                               std::uint64_t cap) {
  const std::uint64_t count = local_vertex_count(s);
  if (count > cap) {
    throw Error(ErrorKind::CapExceeded,
                "local vertex count " + std::to_string(count) +
                    " exceeds cap " + std::to_string(cap));
  }
  const int n = s.party_count();
  std::vector<std::vector<std::vector<int>>> strategies(n);
  for (int p = 0; p < n; ++p) strategies[p] = party_strategies(s.outcomes()[p]);

  std::vector<Behavior> vertices;
  vertices.reserve(count);
  std::vector<std::size_t> choice(n, 0);
  std::vector<int> a(n);
  while (true) {
    Eigen::VectorXd values = Eigen::VectorXd::Zero(s.behavior_size());
    for (Index js = 0; js < s.joint_setting_count(); ++js) {
      const auto x = s.settings_of(js);
      for (int p = 0; p < n; ++p) a[p] = strategies[p][choice[p]][x[p]];
      values[s.index(x, a)] = 1.0;
    }
    vertices.emplace_back(s, std::move(values));

    int p = n - 1;
    for (; p >= 0; --p) {
      if (++choice[p] < strategies[p].size()) break;
      choice[p] = 0;
    }
    if (p < 0) break;
  }
  return vertices;
}

MembershipResult local_membership(const Behavior& b, std::uint64_t cap) {
  const auto vertices = enumerate_local_vertices(b.scenario, cap);
  const Index len = b.scenario.behavior_size();
  const Index nv = static_cast<Index>(vertices.size());

  Eigen::MatrixXd A(len + 1, nv);
  for (Index j = 0; j < nv; ++j) {
    A.col(j).head(len) = vertices[j].values;
    A(len, j) = 1.0;
  }
  Eigen::VectorXd rhs(len + 1);
  rhs.head(len) = b.values;
  rhs(len) = 1.0;

  const auto lp = linprog::find_feasible(A, rhs);
  if (lp.feasible) {
    LocalModel model;
    const double total = lp.x.sum();
    for (Index j = 0; j < nv; ++j) {
      if (lp.x(j) <= 0) continue;
      model.weights.push_back(lp.x(j) / total);
      model.components.push_back(vertices[j]);
      model.vertex_indices.push_back(static_cast<std::size_t>(j));
    }
    return Inside{std::move(model)};
  }

  // Certificate (w, t): <w, v> + t <= 0 on every vertex, <w, b> + t > 0.
  Witness witness;
  witness.coefficients = lp.certificate.head(len);
  const double scale = witness.coefficients.cwiseAbs().maxCoeff();
  if (scale > 0) witness.coefficients /= scale;
  witness.local_bound = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices) {
    witness.local_bound =
        std::max(witness.local_bound, witness.coefficients.dot(v.values));
  }
  witness.behavior_value = witness.coefficients.dot(b.values);
  return Outside{std::move(witness)};
}

ValidationReport validate_behavior(const Behavior& b) {
  const Scenario& s = b.scenario;
  if (b.values.size() != s.behavior_size()) {
    throw Error(ErrorKind::ShapeMismatch, "behavior length does not match scenario");
  }
  ValidationReport report;
  report.nonnegativity = std::max(0.0, -b.values.minCoeff());
  for (Index js = 0; js < s.joint_setting_count(); ++js) {
    const double total = b.values.segment(s.block_offset(js), s.block_size(js)).sum();
    report.normalization = std::max(report.normalization, std::abs(total - 1.0));
  }

  // For each party p, the marginal on everyone else must not depend on x_p.
  const int n = s.party_count();
  for (int p = 0; p < n; ++p) {
    if (s.setting_count(p) < 2) continue;
    std::vector<std::map<std::vector<int>, double>> marginals(s.setting_count(p));
    s.for_each_entry([&](const std::vector<int>& x, const std::vector<int>& a,
                         Index idx) {
      std::vector<int> key;
      key.reserve(2 * (n - 1));
      for (int q = 0; q < n; ++q) {
        if (q != p) key.push_back(x[q]);
      }
      for (int q = 0; q < n; ++q) {
        if (q != p) key.push_back(a[q]);
      }
      marginals[x[p]][key] += b.values[idx];
    });
    for (int xp = 1; xp < s.setting_count(p); ++xp) {
      for (const auto& [key, value] : marginals[0]) {
        const auto it = marginals[xp].find(key);
        const double other = it == marginals[xp].end() ? 0.0 : it->second;
        report.no_signaling = std::max(report.no_signaling, std::abs(value - other));
      }
    }
  }
  return report;
}

Scenario permute_parties(const Scenario& s, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != s.party_count()) {
    throw Error(ErrorKind::ShapeMismatch, "permutation has wrong length");
  }
  std::vector<std::vector<int>> outcomes;
  for (int p : perm) outcomes.push_back(s.outcomes().at(p));
  return Scenario(std::move(outcomes));
}

Behavior permute_parties(const Behavior& b, std::span<const int> perm) {
  Scenario target = permute_parties(b.scenario, perm);
  Eigen::VectorXd values(target.behavior_size());
  const int n = target.party_count();
  std::vector<int> xo(n), ao(n);
  target.for_each_entry([&](const std::vector<int>& x, const std::vector<int>& a,
                            Index idx) {
    for (int i = 0; i < n; ++i) {
      xo[perm[i]] = x[i];
      ao[perm[i]] = a[i];
    }
    values[idx] = b(xo, ao);
  });
  return Behavior(std::move(target), std::move(values));
}

}  // namespace bellbound

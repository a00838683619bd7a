#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bellbound/error.hpp"

namespace bellbound {

using Index = Eigen::Index;

/// Cardinalities of a Bell scenario: outcomes()[i][j] is the number of
/// outcomes of party i under setting j.
///
/// Behaviors over a scenario are flat vectors. Joint settings x = (x_1..x_N)
/// are enumerated lexicographically with party 1 slowest; each joint setting
/// owns a contiguous block of prod_i k_{i,x_i} entries, itself enumerated
/// lexicographically over (a_1..a_N) with party 1 slowest.
class Scenario {
 public:
  Scenario() = default;
  explicit Scenario(std::vector<std::vector<int>> outcomes);

  const std::vector<std::vector<int>>& outcomes() const { return outcomes_; }
  int party_count() const { return static_cast<int>(outcomes_.size()); }
  int setting_count(int party) const {
    return static_cast<int>(outcomes_[party].size());
  }
  int outcome_count(int party, int setting) const {
    return outcomes_[party][setting];
  }

  Index joint_setting_count() const {
    return static_cast<Index>(block_offsets_.size()) - 1;
  }
  Index behavior_size() const { return block_offsets_.back(); }

  Index setting_index(std::span<const int> settings) const;
  Index block_offset(Index joint_setting) const {
    return block_offsets_[joint_setting];
  }
  Index block_size(Index joint_setting) const {
    return block_offsets_[joint_setting + 1] - block_offsets_[joint_setting];
  }
  std::vector<int> settings_of(Index joint_setting) const;

  Index index(std::span<const int> settings,
              std::span<const int> outcomes) const;

  /// Calls fn(settings, outcomes, flat_index) for every entry in layout order.
  template <typename Fn>
  void for_each_entry(Fn&& fn) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;

 private:
  std::vector<std::vector<int>> outcomes_;
  std::vector<Index> block_offsets_{0};
};

/// Conditional probability table P(a|x) laid out as described on Scenario.
struct Behavior {
  Scenario scenario;
  Eigen::VectorXd values;

  Behavior() = default;
  Behavior(Scenario s, Eigen::VectorXd v);

  double operator()(std::span<const int> settings,
                    std::span<const int> outcomes) const {
    return values[scenario.index(settings, outcomes)];
  }
};

/// Convex mixture of deterministic product behaviors.
struct LocalModel {
  std::vector<double> weights;
  std::vector<Behavior> components;
  std::vector<std::size_t> vertex_indices;
};

struct Witness {
  Eigen::VectorXd coefficients;
  double behavior_value = 0;
  double local_bound = 0;
};

struct Inside {
  LocalModel model;
};
struct Outside {
  Witness witness;
};
using MembershipResult = std::variant<Inside, Outside>;

struct ValidationReport {
  double normalization = 0;   // max |sum_a P(a|x) - 1|
  double nonnegativity = 0;   // max(0, -min entry)
  double no_signaling = 0;    // max marginal dependence on a remote setting
  bool ok(double tol) const {
    return normalization <= tol && nonnegativity <= tol && no_signaling <= tol;
  }
};

inline constexpr std::uint64_t kDefaultVertexCap = 1'000'000;

std::int64_t affine_dimension(const Scenario& s);

std::uint64_t local_vertex_count(const Scenario& s);

std::vector<Behavior> enumerate_local_vertices(
    const Scenario& s, std::uint64_t cap = kDefaultVertexCap);

MembershipResult local_membership(const Behavior& b,
                                  std::uint64_t cap = kDefaultVertexCap);

ValidationReport validate_behavior(const Behavior& b);

/// Relabels parties: party i of the result is party perm[i] of the input.
Scenario permute_parties(const Scenario& s, std::span<const int> perm);
Behavior permute_parties(const Behavior& b, std::span<const int> perm);

// ---------------------------------------------------------------------------

template <typename Fn>
void Scenario::for_each_entry(Fn&& fn) const {
  const int n = party_count();
  std::vector<int> x(n, 0);
  std::vector<int> a(n, 0);
  Index flat = 0;
  for (Index js = 0; js < joint_setting_count(); ++js) {
    std::fill(a.begin(), a.end(), 0);
    for (Index e = 0; e < block_size(js); ++e) {
      fn(std::as_const(x), std::as_const(a), flat++);
      for (int p = n - 1; p >= 0; --p) {
        if (++a[p] < outcomes_[p][x[p]]) break;
        a[p] = 0;
      }
    }
    for (int p = n - 1; p >= 0; --p) {
      if (++x[p] < setting_count(p)) break;
      x[p] = 0;
    }
  }
}

}  // namespace bellbound

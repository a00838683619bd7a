#include <doctest.h>

#include <algorithm>
#include <set>

#include "bellbound/error.hpp"
#include "bellbound/quantum.hpp"
#include "bellbound/scenario.hpp"
#include "oracles.hpp"

using namespace bellbound;

namespace {

std::vector<Eigen::VectorXd> vertex_values(const Scenario& s) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& v : enumerate_local_vertices(s)) out.push_back(v.values);
  return out;
}

Behavior mix_with_uniform(const Behavior& b, double v) {
  Eigen::VectorXd values = v * b.values;
  for (Index js = 0; js < b.scenario.joint_setting_count(); ++js) {
    const Index n = b.scenario.block_size(js);
    values.segment(b.scenario.block_offset(js), n).array() += (1 - v) / static_cast<double>(n);
  }
  return Behavior(b.scenario, values);
}

bool inside(const MembershipResult& r) { return std::holds_alternative<Inside>(r); }

}  // namespace

TEST_CASE("affine dimension of small scenarios") {
  CHECK(affine_dimension(Scenario({{2, 2}, {2, 2}})) == 8);
  CHECK(affine_dimension(Scenario({{2, 2}})) == 2);
  CHECK(affine_dimension(Scenario({{3, 3, 3}, {3, 3, 3}})) == 48);
  CHECK(affine_dimension(Scenario({{2, 2}, {2, 2}, {2, 2}})) == 26);
  CHECK(affine_dimension(Scenario({{1}, {1}})) == 0);
}

TEST_CASE("affine dimension matches the rank of the vertex set") {
  const std::vector<Scenario> scenarios = {
      Scenario({{2, 2}, {2, 2}}),       Scenario({{2, 2}}),           Scenario({{3, 3, 3}, {3, 3, 3}}),
      Scenario({{2, 2}, {2, 2}, {2, 2}}), Scenario({{3, 2}, {2, 4}}), Scenario({{2, 2, 2}, {2, 2}}),
      Scenario({{1}, {1}}),             Scenario({{2}, {3, 2, 2}})};
  for (const auto& s : scenarios) {
    CHECK(affine_dimension(s) == oracle::affine_rank(vertex_values(s)));
  }
}

TEST_CASE("vertex enumeration") {
  const Scenario chsh({{2, 2}, {2, 2}});
  const auto v = enumerate_local_vertices(chsh);
  CHECK(v.size() == 16);
  CHECK(local_vertex_count(chsh) == 16);
  CHECK(local_vertex_count(Scenario({{1}, {1}})) == 1);
  CHECK(local_vertex_count(Scenario({{2, 2, 2}, {2, 2}})) == 32);

  // Same set as the brute-force construction, every vertex distinct and 0/1.
  const auto brute = oracle::deterministic2({{2, 2}, {2, 2}});
  std::set<std::vector<double>> a, b;
  for (const auto& x : v) a.insert(std::vector<double>(x.values.begin(), x.values.end()));
  for (const auto& x : brute) b.insert(std::vector<double>(x.begin(), x.end()));
  CHECK(a == b);
  CHECK(a.size() == 16);

  CHECK_THROWS_AS(enumerate_local_vertices(Scenario({{3, 3, 3}, {3, 3, 3}}), 100), Error);
  try {
    enumerate_local_vertices(Scenario({{3, 3, 3}, {3, 3, 3}}), 100);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CapExceeded);
  }
}

TEST_CASE("vertices are valid behaviors and each is its own local model") {
  for (const auto& v : enumerate_local_vertices(Scenario({{2, 2}, {2, 3}}))) {
    CHECK(validate_behavior(v).ok(0));
    const auto r = local_membership(v);
    REQUIRE(inside(r));
    const auto& m = std::get<Inside>(r).model;
    REQUIRE(m.weights.size() == 1);
    CHECK(m.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("indexing layout: party 1 slowest in settings and outcomes") {
  const Scenario s({{2, 3}, {2, 2}});
  const std::vector<std::vector<int>> k = {{2, 3}, {2, 2}};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < k[0][x]; ++a)
        for (int b = 0; b < 2; ++b) {
          const int xs[] = {x, y}, as[] = {a, b};
          CHECK(s.index(xs, as) == oracle::flat2(k, x, y, a, b));
        }
  const int bad_x[] = {2, 0}, zero[] = {0, 0};
  CHECK_THROWS_AS(s.index(bad_x, zero), Error);
  CHECK_THROWS_AS(Behavior(s, Eigen::VectorXd::Zero(3)), Error);
  CHECK_THROWS_AS(Scenario({{2, 0}}), Error);
}

TEST_CASE("PR box and the Tsirelson point are outside, uniform noise is inside") {
  const Scenario s({{2, 2}, {2, 2}});
  const auto pr = local_membership(Behavior(s, oracle::pr_box()));
  REQUIRE_FALSE(inside(pr));
  const auto& w = std::get<Outside>(pr).witness;
  CHECK(w.behavior_value > w.local_bound + 1e-6);
  CHECK(w.coefficients.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  // The bound is attained on the polytope.
  double best = -1e9;
  for (const auto& v : enumerate_local_vertices(s)) best = std::max(best, w.coefficients.dot(v.values));
  CHECK(best == doctest::Approx(w.local_bound).epsilon(1e-9));
  CHECK(w.coefficients.dot(oracle::pr_box()) == doctest::Approx(w.behavior_value).epsilon(1e-9));

  Eigen::VectorXd tsirelson(16);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) tsirelson[(x * 2 + y) * 4 + a * 2 + b] = oracle::tsirelson_probability(x, y, a, b);
  CHECK_FALSE(inside(local_membership(Behavior(s, tsirelson))));

  const auto uniform = local_membership(Behavior(s, Eigen::VectorXd::Constant(16, 0.25)));
  REQUIRE(inside(uniform));
  const auto& m = std::get<Inside>(uniform).model;
  Eigen::VectorXd remix = Eigen::VectorXd::Zero(16);
  double total = 0;
  for (std::size_t i = 0; i < m.weights.size(); ++i) {
    CHECK(m.weights[i] >= 0);
    total += m.weights[i];
    remix += m.weights[i] * m.components[i].values;
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK((remix.array() - 0.25).abs().maxCoeff() < 1e-9);
}

TEST_CASE("membership threshold of noisy Tsirelson behavior") {
  const auto b = born_evaluate(oracle::tsirelson_realization());
  // Local iff 2*sqrt(2)*v <= 2.
  CHECK(inside(local_membership(mix_with_uniform(b, 0.70))));
  CHECK_FALSE(inside(local_membership(mix_with_uniform(b, 0.72))));
}

TEST_CASE("property: membership is invariant under party permutation") {
  const std::vector<int> swap2 = {1, 0};
  const std::vector<int> cycle3 = {2, 0, 1};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scenario s2({{2, 2}, {2, 3}});
    const std::vector<Index> d2 = {2, 2};
    const auto b2 = mix_with_uniform(born_evaluate(random_realization(s2, d2, seed)), 0.6 + 0.02 * seed);
    CHECK(inside(local_membership(b2)) == inside(local_membership(permute_parties(b2, swap2))));

    const Scenario s3({{2, 2}, {2, 2}, {2, 2}});
    const std::vector<Index> d3 = {2, 2, 2};
    const auto b3 = mix_with_uniform(born_evaluate(random_realization(s3, d3, seed)), 0.5 + 0.025 * seed);
    CHECK(inside(local_membership(b3)) == inside(local_membership(permute_parties(b3, cycle3))));
  }
  const Scenario s({{2, 3}, {4}});
  const auto p = permute_parties(s, swap2);
  CHECK(p == Scenario({{4}, {2, 3}}));
  CHECK(permute_parties(p, swap2) == s);
}

TEST_CASE("validation reports") {
  const Scenario s({{2, 2}, {2, 2}});
  CHECK(validate_behavior(Behavior(s, oracle::pr_box())).ok(1e-12));
  Eigen::VectorXd bad = oracle::pr_box();
  bad[0] += 0.1;
  bad[1] -= 0.1;  // Alice's marginal now depends on y
  const auto r = validate_behavior(Behavior(s, bad));
  CHECK(r.normalization < 1e-12);
  CHECK(r.no_signaling == doctest::Approx(0.1));
  bad[2] = -0.2;
  CHECK(validate_behavior(Behavior(s, bad)).nonnegativity == doctest::Approx(0.2));
}

#include <doctest.h>

#include "bellbound/bellplus.hpp"
#include "bellbound/error.hpp"
#include "bellbound/optimize.hpp"
#include "oracles.hpp"

using namespace bellbound;

namespace {

CausalScenario instrumental() {
  return {{{{2}, {2, 2}}, {{2}, {2, 2}}}, {{0, 1, 0}}};
}

CausalScenario chain() {
  return {{{{2}, {2, 2}}, {{2}, {2, 2}}, {{2}, {2, 2}}}, {{0, 1, 0}, {1, 2, 0}}};
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("instrumental interruption") {
  const auto m = maximal_interruption(instrumental());
  CHECK(m.interrupted == Scenario({{2, 2}, {2, 2}}));
  CHECK(m.bellplus == Scenario({{2, 2}, {2}}));
  REQUIRE(m.bindings.size() == 1);
  CHECK(m.bindings[0] == Binding{1, 0, 0});
}

TEST_CASE("scenario without edges is its own interruption") {
  const CausalScenario c{{{{2}, {2, 2}}, {{3}, {2, 3, 2}}}, {}};
  const auto m = maximal_interruption(c);
  CHECK(m.bindings.empty());
  CHECK(m.interrupted == Scenario({{2, 2}, {2, 3, 2}}));
  CHECK(m.bellplus == m.interrupted);
  // Interrupting the interrupted scenario changes nothing.
  const CausalScenario again{c.parties, {}};
  CHECK(maximal_interruption(again).interrupted == m.interrupted);
}

TEST_CASE("chain interruption") {
  const auto m = maximal_interruption(chain());
  CHECK(m.interrupted == Scenario({{2, 2}, {2, 2}, {2, 2}}));
  CHECK(m.bellplus == Scenario({{2, 2}, {2}, {2}}));
  CHECK(m.bindings == std::vector<Binding>{{1, 0, 0}, {2, 0, 1}});
}

TEST_CASE("invalid causal scenarios") {
  CausalScenario cyc = instrumental();
  cyc.parties[0].slots = {2};
  cyc.edges.push_back({1, 0, 0});
  CHECK(kind_of([&] { maximal_interruption(cyc); }) == ErrorKind::CyclicDependency);

  CausalScenario ragged = instrumental();
  ragged.parties[0].outcomes = {2, 3};
  CHECK(kind_of([&] { maximal_interruption(ragged); }) == ErrorKind::InvalidArgument);

  CausalScenario mismatch = instrumental();
  mismatch.parties[1].slots = {3};
  mismatch.parties[1].outcomes = {2, 2, 2};
  CHECK(kind_of([&] { maximal_interruption(mismatch); }) == ErrorKind::InvalidArgument);

  CausalScenario dangling = instrumental();
  dangling.edges[0].to_party = 5;
  CHECK(kind_of([&] { maximal_interruption(dangling); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("instrumental projection is the diagonal slice") {
  const auto m = maximal_interruption(instrumental());
  const std::vector<Index> dims = {2, 2};
  const auto b = born_evaluate(random_realization(m.interrupted, dims, 3));
  const auto p = project_behavior(b, m);
  CHECK_FALSE(p.normalization_warning);
  CHECK(p.normalization_residual < 1e-12);
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a)
      for (int bb = 0; bb < 2; ++bb) {
        const int xs[] = {x, 0}, as[] = {a, bb};
        const int full_x[] = {x, a};
        CHECK(p.behavior(xs, as) == b(full_x, as));
      }
}

TEST_CASE("empty bindings give the identity projection") {
  const CausalScenario c{{{{2}, {2, 2}}, {{2}, {2, 2}}}, {}};
  const auto m = maximal_interruption(c);
  const std::vector<Index> dims = {2, 2};
  const auto b = born_evaluate(random_realization(m.interrupted, dims, 4));
  CHECK(project_behavior(b, m).behavior.values == b.values);
}

TEST_CASE("non-normalized slices are flagged") {
  const auto m = maximal_interruption(instrumental());
  // Signaling behavior a = y: both diagonal slices carry full weight.
  Eigen::VectorXd v = Eigen::VectorXd::Zero(16);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) v[(x * 2 + y) * 4 + y * 2] = 1;
  const auto p = project_behavior(Behavior(m.interrupted, v), m);
  CHECK(p.normalization_warning);
  CHECK(p.normalization_residual == doctest::Approx(1.0));
  // A behavior that is not a probability distribution leaks into the slice.
  Eigen::VectorXd w = Eigen::VectorXd::Constant(16, 0.25);
  w[0] = 0.5;
  const auto q = project_behavior(Behavior(m.interrupted, w), m);
  CHECK(q.normalization_warning);
}

TEST_CASE("Bell+ dimension bounds") {
  const auto b = bellplus_dimension_bound(instrumental());
  REQUIRE(b.applicable);
  CHECK(b.affine_dimension == 8);
  CHECK(b.extremal_caps == std::vector<Index>{2, 2});
  CHECK(b.general_caps == std::vector<Index>{16, 16});
  CHECK_FALSE(b.notes.empty());

  const CausalScenario plain{{{{2}, {2, 2}}, {{2}, {2, 2}}}, {}};
  const auto p = bellplus_dimension_bound(plain);
  CHECK(p.extremal_caps == preset_dimension_caps(Scenario({{2, 2}, {2, 2}})));
  CHECK(p.affine_dimension == affine_dimension(Scenario({{2, 2}, {2, 2}})));

  const CausalScenario three{{{{3}, {2, 2, 2}}, {{2}, {2, 2}}}, {}};
  const auto n = bellplus_dimension_bound(three);
  CHECK_FALSE(n.applicable);
  CHECK_FALSE(n.notes.empty());
}

TEST_CASE("property: projection matches sequential simulation") {
  const auto m = maximal_interruption(instrumental());
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::vector<Index> dims = {2 + static_cast<Index>(seed % 2), 2};
    auto r = random_realization(m.interrupted, dims, seed);
    if (seed % 3 == 0) {
      auto rng = make_rng(seed, 5);
      r.state = DensityOperator{oracle::random_density(dims[0] * dims[1], 2, rng)};
    }
    const auto p = project_behavior(born_evaluate(r), m);
    CHECK(p.normalization_residual < 1e-9);
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) {
          const int xs[] = {x, 0}, as[] = {a, bb};
          CHECK(std::abs(p.behavior(xs, as) - oracle::instrumental_sequential(r, x, a, bb)) < 1e-10);
        }
  }
}

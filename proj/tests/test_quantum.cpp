#include <doctest.h>

#include "bellbound/error.hpp"
#include "bellbound/linalg.hpp"
#include "bellbound/quantum.hpp"
#include "oracles.hpp"

using namespace bellbound;

namespace {

Povm computational(Index d) {
  Povm p;
  for (Index i = 0; i < d; ++i) {
    MatrixXcd e = MatrixXcd::Zero(d, d);
    e(i, i) = 1;
    p.effects.push_back(e);
  }
  return p;
}

}  // namespace

TEST_CASE("product basis state gives a deterministic outcome") {
  QuantumRealization r;
  r.scenario = Scenario({{2}, {2}});
  r.dims = {2, 2};
  VectorXcd psi = VectorXcd::Zero(4);
  psi[0] = 1;
  r.state = StateVector{{2, 2}, psi};
  r.measurements = {{computational(2)}, {computational(2)}};
  const auto b = born_evaluate(r);
  CHECK(b.values[0] == doctest::Approx(1.0));
  CHECK(b.values.sum() == doctest::Approx(1.0));
}

TEST_CASE("maximally mixed state gives uniform statistics") {
  QuantumRealization r;
  r.scenario = Scenario({{2}, {2}});
  r.dims = {2, 2};
  r.state = DensityOperator{MatrixXcd::Identity(4, 4) / 4.0};
  r.measurements = {{computational(2)}, {computational(2)}};
  const auto b = born_evaluate(r);
  CHECK((b.values.array() - 0.25).abs().maxCoeff() < 1e-14);
}

TEST_CASE("Tsirelson realization reproduces the analytic correlators") {
  const auto b = born_evaluate(oracle::tsirelson_realization());
  double chsh = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) {
          const int xs[] = {x, y}, as[] = {a, bb};
          CHECK(b(xs, as) == doctest::Approx(oracle::tsirelson_probability(x, y, a, bb)).epsilon(1e-12));
          chsh += oracle::chsh_coefficients()[(x * 2 + y) * 4 + a * 2 + bb] * b(xs, as);
        }
  CHECK(chsh == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("purification") {
  SUBCASE("pure input needs a one-dimensional ancilla") {
    VectorXcd v(2);
    v << 0.6, cplx(0, 0.8);
    const auto p = purify(DensityOperator{v * v.adjoint()});
    CHECK(p.dims == std::vector<Index>{2, 1});
  }
  SUBCASE("maximally mixed qubit") {
    const auto p = purify(DensityOperator{MatrixXcd::Identity(2, 2) / 2.0});
    CHECK(p.dims == std::vector<Index>{2, 2});
    const MatrixXcd rho = p.amplitudes * p.amplitudes.adjoint();
    const int keep[] = {0};
    CHECK((partial_trace(rho, p.dims, keep) - MatrixXcd::Identity(2, 2) / 2.0).norm() < 1e-12);
  }
  SUBCASE("rank three on four dimensions") {
    auto rng = make_rng(3);
    const MatrixXcd rho = oracle::random_density(4, 3, rng);
    const auto p = purify(DensityOperator{rho});
    CHECK(p.dims == std::vector<Index>{4, 3});
    const MatrixXcd full = p.amplitudes * p.amplitudes.adjoint();
    const int keep[] = {0};
    CHECK((partial_trace(full, p.dims, keep) - rho).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("linear algebra helpers agree with explicit constructions") {
  auto rng = make_rng(11);
  const MatrixXcd a = oracle::random_density(2, 2, rng), b = oracle::random_density(3, 2, rng);
  const MatrixXcd c = random_unitary(2, rng), d = random_unitary(3, rng);
  const std::vector<Index> dims = {2, 3};
  const MatrixXcd ab = oracle::kron(a, b);
  const int keep0[] = {0}, keep1[] = {1};
  CHECK((partial_trace(ab, dims, keep0) - a).norm() < 1e-12);
  CHECK((partial_trace(ab, dims, keep1) - b).norm() < 1e-12);
  CHECK(std::abs((ab * oracle::kron(c, d)).trace() - (a * c).trace() * (b * d).trace()) < 1e-12);
  CHECK((embed(MatrixXcd::Identity(3, 3), 1, dims) - MatrixXcd::Identity(6, 6)).norm() == 0);
  CHECK((embed(c, 0, dims) - oracle::kron(c, MatrixXcd::Identity(3, 3))).norm() < 1e-14);
  const std::vector<MatrixXcd> factors = {c, d};
  CHECK((kron_all<cplx>(factors) - oracle::kron(c, d)).norm() < 1e-14);

  const std::vector<Index> dims3 = {2, 3, 2};
  const VectorXcd v = random_unit_vector(12, rng);
  CHECK((apply_local(d, 1, dims3, v) - embed(d, 1, dims3) * v).norm() < 1e-13);
  const MatrixXcd full = v * v.adjoint();
  const int keep_mid[] = {1};
  CHECK((reduced_outer(v, v, dims3, 1) - partial_trace(full, dims3, keep_mid)).norm() < 1e-13);
}

TEST_CASE("random realizations are deterministic and physical") {
  const Scenario s({{2, 3}, {3, 2, 2}});
  const std::vector<Index> dims = {3, 2};
  const auto r1 = random_realization(s, dims, 42);
  const auto r2 = random_realization(s, dims, 42);
  CHECK(std::get<StateVector>(r1.state).amplitudes == std::get<StateVector>(r2.state).amplitudes);
  CHECK(r1.measurements[1][0].effects[2] == r2.measurements[1][0].effects[2]);
  CHECK_NOTHROW(check_realization(r1));
  const auto b = born_evaluate(r1);
  CHECK(validate_behavior(b).ok(1e-10));
}

TEST_CASE("errors on inconsistent realizations") {
  auto r = oracle::tsirelson_realization();
  r.measurements[1][0] = computational(3);
  try {
    born_evaluate(r);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
  Povm bad = computational(2);
  bad.effects[0] *= 0.5;
  CHECK_THROWS_AS(check_povm(bad), Error);
  CHECK_THROWS_AS(check_state(DensityOperator{MatrixXcd::Identity(2, 2)}), Error);
}

TEST_CASE("property: quantum behaviors are no-signaling") {
  const std::vector<Scenario> scenarios = {Scenario({{2, 2}, {2, 2}}), Scenario({{3, 2}, {2, 2, 3}}),
                                           Scenario({{2, 2}, {2, 2}, {2, 3}})};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto& s = scenarios[seed % scenarios.size()];
    std::vector<Index> dims(s.party_count(), 2 + static_cast<Index>(seed % 2));
    auto r = random_realization(s, dims, seed);
    if (seed % 4 == 0) {
      auto rng = make_rng(seed, 1);
      r.state = DensityOperator{oracle::random_density(product(dims), 3, rng)};
    }
    CHECK(validate_behavior(born_evaluate(r)).ok(1e-10));
  }
}

TEST_CASE("property: Born rule is linear in the state") {
  const Scenario s({{2, 2}, {2, 3}});
  const std::vector<Index> dims = {2, 3};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = random_realization(s, dims, seed);
    auto rng = make_rng(seed, 9);
    const MatrixXcd r1 = oracle::random_density(6, 2, rng), r2 = oracle::random_density(6, 4, rng);
    const double lambda = 0.3;
    r.state = DensityOperator{r1};
    const auto b1 = born_evaluate(r);
    r.state = DensityOperator{r2};
    const auto b2 = born_evaluate(r);
    r.state = DensityOperator{lambda * r1 + (1 - lambda) * r2};
    const auto mix = born_evaluate(r);
    CHECK((mix.values - (lambda * b1.values + (1 - lambda) * b2.values)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("property: purification preserves the behavior") {
  const Scenario s({{2, 2}, {2, 2}});
  const std::vector<Index> dims = {2, 2};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = random_realization(s, dims, seed);
    auto rng = make_rng(seed, 2);
    r.state = DensityOperator{oracle::random_density(4, 1 + static_cast<Index>(seed % 4), rng)};
    const auto before = born_evaluate(r);
    for (int party = 0; party < 2; ++party) {
      Index anc = 0;
      const auto p = purify_into(r, party, &anc);
      CHECK(p.is_pure());
      CHECK(anc == 1 + static_cast<Index>(seed % 4));
      CHECK(p.dims[party] == dims[party] * anc);
      CHECK((born_evaluate(p).values - before.values).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

#include <catch2/catch_amalgamated.hpp>

#include "qmaps/classify.hpp"
#include "test_helpers.hpp"

using namespace qmaps;
using namespace qmaps::test;

namespace {

OptimizerConfig fast_config() {
  OptimizerConfig cfg;
  cfg.grid_theta = 32;
  cfg.grid_phi = 64;
  cfg.restarts = 6;
  return cfg;
}

HarnessConfig fast_harness() {
  HarnessConfig hc;
  hc.optimizer = fast_config();
  return hc;
}

} // namespace

TEST_CASE("classify_state on the four reference states") {
  Rng rng(81);
  const OptimizerConfig cfg = fast_config();

  const BipartiteState prod =
      product_state(random_density(2, rng), random_density(2, rng));
  REQUIRE(classify_state(prod, 1e-8, cfg).label ==
          StateLabel::SimplySeparable);

  const StateClass bell = classify_state(bell_state(), 1e-8, cfg);
  REQUIRE(bell.label == StateLabel::Entangled);
  REQUIRE(bell.min_pt_eigenvalue == Catch::Approx(-0.5).margin(1e-12));

  REQUIRE(classify_state(classical_mixture(), 1e-8, cfg).label ==
          StateLabel::ClassicallyCorrelated);

  // separable (PPT, two qubits) but discordant
  const StateClass eq3 =
      classify_state(example_state({{0.5, 0, 0}}, 0.5), 1e-8, cfg);
  REQUIRE(eq3.label == StateLabel::QuantumCorrelatedSeparable);
  REQUIRE(eq3.discord > 1e-3);
}

TEST_CASE("classically correlated states never leave the classical region") {
  Rng rng(82);
  const OptimizerConfig cfg = fast_config();
  for (int rep = 0; rep < 8; ++rep) {
    const BipartiteState cc = random_classically_correlated(2, 2, rng);
    const StateLabel label = classify_state(cc, 1e-8, cfg).label;
    REQUIRE((label == StateLabel::SimplySeparable ||
             label == StateLabel::ClassicallyCorrelated));
  }
}

TEST_CASE("PPT in large dimensions is reported undecided") {
  // separable (hence PPT) 3x3 state with discord: beyond the two-qubit /
  // qubit-qutrit regime the PPT test cannot certify separability
  Matrix plus = Matrix::Zero(3, 3);
  plus(0, 0) = plus(0, 1) = plus(1, 0) = plus(1, 1) = 0.5;
  Matrix zero = Matrix::Zero(3, 3);
  zero(0, 0) = 1.0;
  const Matrix m = 0.5 * kron(zero, zero) + 0.5 * kron(plus, plus);
  const StateClass c = classify_state(BipartiteState(DensityMatrix(m), 3, 3),
                                      1e-8, fast_config());
  REQUIRE(c.label == StateLabel::PptUndecided);
  REQUIRE(c.min_pt_eigenvalue > -1e-10);
}

TEST_CASE("theorem_harness holds on a randomized block") {
  const auto records = theorem_harness(
      24, {{2, 2}, {2, 3}, {3, 2}, {3, 3}}, 1234, fast_harness());
  REQUIRE(records.size() == 24);
  for (const auto &r : records) {
    REQUIRE(r.min_choi_eigenvalue > -1e-10);
    REQUIRE(r.completeness_error < 1e-10);
    REQUIRE(r.match_error < 1e-10);
    REQUIRE(r.extra_match_error < 1e-10);
    REQUIRE(r.discord < 1e-5);
    REQUIRE((r.state_class == StateLabel::ClassicallyCorrelated ||
             r.state_class == StateLabel::SimplySeparable));
  }
  // dims cycle through the list
  REQUIRE(records[0].dim_s == 2);
  REQUIRE(records[1].dim_e == 3);
  REQUIRE(records[2].dim_s == 3);
}

TEST_CASE("theorem_harness is deterministic under a fixed seed") {
  const auto a = theorem_harness(6, {{2, 2}, {3, 2}}, 77, fast_harness());
  const auto b = theorem_harness(6, {{2, 2}, {3, 2}}, 77, fast_harness());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].seed == b[i].seed);
    REQUIRE(a[i].min_choi_eigenvalue == b[i].min_choi_eigenvalue);
    REQUIRE(a[i].discord == b[i].discord);
    REQUIRE(a[i].completeness_error == b[i].completeness_error);
    REQUIRE(a[i].match_error == b[i].match_error);
  }
  REQUIRE_THROWS_AS(theorem_harness(0, {{2, 2}}, 1, fast_harness()),
                    std::invalid_argument);
}

TEST_CASE("ncp_search finds NCP maps without contrapositive violations") {
  SECTION("example family") {
    const auto records =
        ncp_search(20, NcpSampler::ExampleFamily, 99, fast_harness());
    std::size_t ncp = 0;
    for (const auto &r : records) {
      if (r.min_choi_eigenvalue < -1e-6) {
        ++ncp;
        REQUIRE(r.discord > 1e-6);
      }
      REQUIRE(r.dim_s == 2);
      REQUIRE(r.dim_e == 2);
    }
    REQUIRE(ncp > 0);
  }

  SECTION("random correlated states") {
    const auto records =
        ncp_search(20, NcpSampler::RandomCorrelated, 99, fast_harness());
    std::size_t ncp = 0;
    for (const auto &r : records)
      if (r.min_choi_eigenvalue < -1e-6) {
        ++ncp;
        REQUIRE(r.discord > 1e-6);
      }
    REQUIRE(ncp > 0); // at this seed a nonzero fraction is NCP
  }

  SECTION("deterministic under a fixed seed") {
    const auto a = ncp_search(5, NcpSampler::ExampleFamily, 7, fast_harness());
    const auto b = ncp_search(5, NcpSampler::ExampleFamily, 7, fast_harness());
    for (std::size_t i = 0; i < a.size(); ++i) {
      REQUIRE(a[i].min_choi_eigenvalue == b[i].min_choi_eigenvalue);
      REQUIRE(a[i].discord == b[i].discord);
    }
  }
}

TEST_CASE("product members of the example family always give CP maps") {
  // c23 = 0 means chi = 0: the degenerate simply-separable corner of the
  // example-family sampler
  Rng rng(83);
  for (int rep = 0; rep < 10; ++rep) {
    const BlochVector a{{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                         rng.uniform(-0.5, 0.5)}};
    const BipartiteState rho = example_state(a, 0.0);
    const DynamicalMap map =
        map_from_joint(rho, random_unitary(4, rng));
    REQUIRE(min_eigenvalue(map.b_matrix) > -1e-10);
  }
}

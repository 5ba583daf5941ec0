#include <catch2/catch_amalgamated.hpp>

#include "support/corpus.hpp"
#include "support/rational.hpp"

using namespace nullitylab;

TEST_CASE("hypothesis gate") {
  REQUIRE_THROWS_AS(construct_example(5, 2, 0.1, 0.05), invalid_input);
  REQUIRE_THROWS_AS(construct_example(4, 1, 0.1, 0.05), invalid_input);
  REQUIRE_THROWS_AS(construct_example(9, 0, 0.1, 0.05), invalid_input);
}

TEST_CASE("filtration depth matches the exact oracle") {
  for (auto [n, v0] : {std::pair{5, 1}, {7, 1}, {9, 1}, {9, 2}}) {
    CAPTURE(n, v0);
    RepresentationData rep = so3_irrep(n);
    Subspace V0 = span_of(Mat(Mat::Identity(n, n).leftCols(v0)));
    auto [chain, d] = filtration(rep, V0);
    auto exact = ratoracle::filtration_dims(ratoracle::harmonic_module(n), v0);
    REQUIRE(static_cast<int>(exact.size()) - 1 == d);
    for (int i = 0; i <= d; ++i) REQUIRE(chain[i].dim() == exact[i]);
  }
}

TEST_CASE("frame invariants") {
  const auto& ex = corpus::example(7, 1);
  const auto& f = ex.frame;
  REQUIRE(f.d == 3);
  // v in the top proper step, v' orthogonal to it and nonzero.
  REQUIRE(f.V_filtration[f.d - 1].contains(f.v));
  REQUIRE(f.v_prime.norm() > 1e-6);
  REQUIRE(f.V_filtration[f.d - 1].project(f.v_prime).norm() <= 1e-12);
  // z unit and orthogonal to w in the rotation factor.
  REQUIRE(f.z.norm() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(std::abs(f.z.dot(f.w)) <= 1e-12);
  // Metric couplings realized exactly by the assembled metric.
  const int n = 7;
  Vec vp = Vec::Zero(10), w = Vec::Zero(10), z = Vec::Zero(10);
  vp.head(n) = f.v_prime;
  w.tail(3) = f.w;
  z.tail(3) = f.z;
  REQUIRE(vp.dot(ex.model.metric * w) == Catch::Approx(f.a).margin(1e-12));
  REQUIRE(vp.dot(ex.model.metric * z) == Catch::Approx(f.b).margin(1e-12));
}

TEST_CASE("construction is deterministic") {
  ConstructedExample a = construct_example(7, 1, 0.1, 0.05);
  ConstructedExample b = construct_example(7, 1, 0.1, 0.05);
  REQUIRE((a.model.metric - b.model.metric).lpNorm<Eigen::Infinity>() == 0);
  REQUIRE(a.frame.lambda == b.frame.lambda);
}

TEST_CASE("genericity certificate") {
  const auto& ex = corpus::example(7, 1);
  REQUIRE(ex.certificate.pass);
  REQUIRE(ex.certificate.cross_residual <= 1e-9);
  // Degenerate coupling b = -lambda a kills the pairing.
  double lam = ex.frame.lambda;
  ConstructedExample bad = construct_example(7, 1, 0.1, -lam * 0.1);
  REQUIRE_FALSE(bad.certificate.pass);
  REQUIRE(bad.report.flags.at("genericity") == Flag::fail);
}

TEST_CASE("oversized couplings are rejected with an SPD diagnostic") {
  REQUIRE_THROWS_WITH(construct_example(7, 1, 50.0, 0.05),
                      Catch::Matchers::ContainsSubstring("positive"));
}

TEST_CASE("prescribed nullity flag: honest outcome per depth") {
  // Depth >= 3 puts the prescribed subspace inside the nullity...
  REQUIRE(corpus::example(7, 1).report.flags.at("v0_in_nullity") == Flag::pass);
  // ...while the shallowest admissible case (depth 2) provably cannot: the
  // construction still succeeds mechanically but the flag fails and the
  // nullity is zero.
  const auto& ex5 = corpus::example(5, 1);
  REQUIRE(ex5.report.dims.at("d") == 2);
  REQUIRE(ex5.report.dims.at("nu") == 0);
  REQUIRE(ex5.report.branch == "trivial_zero");
  REQUIRE(ex5.report.flags.at("v0_in_nullity") == Flag::fail);
}

TEST_CASE("sweep rows") {
  auto rows = sweep({5, 7}, {1, 2}, {0.1}, {0.05});
  REQUIRE(rows.size() == 4);
  // (5,1): admissible but the depth-2 obstruction fails the structure gate.
  REQUIRE(rows[0].admissible);
  REQUIRE_FALSE(rows[0].structure_pass);
  // (5,2) and (7,2): inadmissible.
  REQUIRE_FALSE(rows[1].admissible);
  REQUIRE_FALSE(rows[3].admissible);
  // (7,1): passes with the expected dimensions.
  REQUIRE(rows[2].admissible);
  REQUIRE(rows[2].structure_pass);
  REQUIRE(rows[2].d == 3);
  REQUIRE(rows[2].dim_nu == 2);
  REQUIRE(rows[2].dim_nu1 == 4);
  REQUIRE(rows[2].dim_nu2 == 6);
  REQUIRE(rows[2].genericity);
}

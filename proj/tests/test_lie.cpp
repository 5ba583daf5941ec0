#include <catch2/catch_amalgamated.hpp>

#include "nullitylab/lie.hpp"

using namespace nullitylab;

TEST_CASE("so3 structure constants") {
  LieAlgebraData so3 = so3_algebra();
  REQUIRE(so3.dim == 3);
  REQUIRE(antisymmetry_residual(so3) == 0);
  REQUIRE(check_jacobi(so3) == 0);
  Vec e1 = Vec::Unit(3, 0), e2 = Vec::Unit(3, 1);
  REQUIRE((bracket(so3, e1, e2) - Vec::Unit(3, 2)).norm() == 0);
}

TEST_CASE("abelian algebra brackets vanish") {
  LieAlgebraData ab = abelian_algebra(4);
  REQUIRE(bracket(ab, Vec(Vec::Unit(4, 0)), Vec(Vec::Unit(4, 3))).norm() == 0);
  REQUIRE(check_jacobi(ab) == 0);
}

TEST_CASE("irreducible rotation modules") {
  for (int n : {3, 5, 7, 9}) {
    CAPTURE(n);
    RepresentationData rep = so3_irrep(n);
    REQUIRE(rep.n == n);
    RepCheck chk = check_representation(rep);
    REQUIRE(chk.skew <= 1e-12);
    REQUIRE(chk.bracket_realization <= 1e-12);
    REQUIRE(chk.commutant_dim == 1);
    // Quadratic invariant: sum_a G_a^2 = -l(l+1) Id with l = (n-1)/2.
    const int l = (n - 1) / 2;
    Mat cas = Mat::Zero(n, n);
    for (const Mat& G : rep.generators) cas += G * G;
    REQUIRE((cas + l * (l + 1) * Mat::Identity(n, n)).lpNorm<Eigen::Infinity>() <=
            1e-12);
  }
}

TEST_CASE("even-dimensional module request is rejected") {
  REQUIRE_THROWS_AS(so3_irrep(4), invalid_input);
  REQUIRE_THROWS_AS(so3_irrep(0), invalid_input);
}

TEST_CASE("semidirect product algebra") {
  RepresentationData rep = so3_irrep(5);
  LieAlgebraData g = semidirect(rep);
  REQUIRE(g.dim == 8);
  REQUIRE(antisymmetry_residual(g) <= 1e-15);
  REQUIRE(check_jacobi(g) <= 1e-12);
  // Translation block abelian; rotation block acts by the representation.
  REQUIRE(bracket(g, Vec(Vec::Unit(8, 0)), Vec(Vec::Unit(8, 3))).norm() == 0);
  Vec w = bracket(g, Vec(Vec::Unit(8, 5)), Vec(Vec::Unit(8, 0)));
  REQUIRE((w.head(5) - rep.generators[0].col(0)).norm() <= 1e-15);
  REQUIRE(w.tail(3).norm() == 0);
}

TEST_CASE("bracket closure finds the smallest ideal") {
  RepresentationData rep = so3_irrep(5);
  LieAlgebraData g = semidirect(rep);
  // A translation seed generates exactly the translation ideal (irreducible
  // action sweeps out all of R^5, translations commute).
  Subspace seed = span_of(Mat(Vec::Unit(8, 0)));
  Subspace ideal = bracket_closure(g, seed);
  REQUIRE(ideal.dim() == 5);
  for (int j = 0; j < 5; ++j) REQUIRE(ideal.contains(Vec(Vec::Unit(8, j))));
  // A rotation seed generates everything.
  REQUIRE(bracket_closure(g, span_of(Mat(Vec::Unit(8, 5)))).dim() == 8);
}

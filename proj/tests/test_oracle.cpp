#include <catch2/catch_amalgamated.hpp>

#include "nullitylab/lie.hpp"
#include "support/rational.hpp"

using namespace nullitylab;
using namespace ratoracle;

TEST_CASE("rational arithmetic basics") {
  REQUIRE(Frac(2, 4) == Frac(1, 2));
  REQUIRE(Frac(1, 3) + Frac(1, 6) == Frac(1, 2));
  REQUIRE(Frac(-2, -4) == Frac(1, 2));
  REQUIRE(Frac(3, -6) == Frac(-1, 2));
  REQUIRE((Frac(2, 3) * Frac(3, 2)) == Frac(1));
  REQUIRE_THROWS_AS(Frac(1) / Frac(0), std::domain_error);
}

TEST_CASE("exact harmonic module: dimensions and commutation") {
  for (int n : {3, 5, 7}) {
    CAPTURE(n);
    HarmonicModule H = harmonic_module(n);
    REQUIRE(H.dim == n);
    // [A1, A2] = A3 and cyclic, exactly.
    REQUIRE(fzero(fsub(fsub(fmul(H.A[0], H.A[1]), fmul(H.A[1], H.A[0])), H.A[2])));
    REQUIRE(fzero(fsub(fsub(fmul(H.A[1], H.A[2]), fmul(H.A[2], H.A[1])), H.A[0])));
    REQUIRE(fzero(fsub(fsub(fmul(H.A[2], H.A[0]), fmul(H.A[0], H.A[2])), H.A[1])));
    // Casimir = -l(l+1) identity, exactly.
    const int l = (n - 1) / 2;
    FMat cas = fzeros(n, n);
    for (int ax = 0; ax < 3; ++ax) {
      FMat sq = fmul(H.A[ax], H.A[ax]);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cas[i][j] = cas[i][j] + sq[i][j];
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        REQUIRE(cas[i][j] == (i == j ? Frac(-l * (l + 1)) : Frac(0)));
  }
}

TEST_CASE("generators are skew for the exact inner product") {
  HarmonicModule H = harmonic_module(5);
  for (int ax = 0; ax < 3; ++ax) {
    // gram * A + A^T * gram = 0, exactly.
    FMat GA = fmul(H.gram, H.A[ax]);
    for (int i = 0; i < H.dim; ++i)
      for (int j = 0; j < H.dim; ++j)
        REQUIRE(GA[i][j] + GA[j][i] == Frac(0));
  }
}

TEST_CASE("exact filtration dimensions") {
  // Depths: the shallowest admissible module stops at 2; larger modules give
  // the depth >= 3 needed downstream.
  auto check = [](int n, int v0, int depth) {
    auto dims = filtration_dims(harmonic_module(n), v0);
    CAPTURE(n, v0);
    REQUIRE(static_cast<int>(dims.size()) - 1 == depth);
    REQUIRE(dims.front() == v0);
    REQUIRE(dims.back() == n);
    for (size_t i = 1; i < dims.size(); ++i) REQUIRE(dims[i] > dims[i - 1]);
  };
  check(5, 1, 2);
  check(7, 1, 3);
  check(9, 1, 4);
  check(9, 2, 3);
}

TEST_CASE("floating-point module matches the exact oracle") {
  HarmonicModule H = harmonic_module(5);
  RepresentationData rep = so3_irrep(5);

  // Rotation-factor structure constants are exact integers in both worlds.
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        double expect = 0;
        if (a != b && b != c && a != c)
          expect = ((b - a + 3) % 3 == 1) ? 1.0 : -1.0;
        REQUIRE(rep.k_algebra.c(a, b, c) == expect);
      }

  // Traces of generator products are similarity invariants: compare the
  // floating-point values against the exact rationals.
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      FMat P = fmul(H.A[a], H.A[b]);
      Frac tr(0);
      for (int i = 0; i < 5; ++i) tr = tr + P[i][i];
      double num = (rep.generators[a] * rep.generators[b]).trace();
      REQUIRE(num == Catch::Approx(tr.to_double()).margin(1e-12));
    }

  // Entry-level match through an exact orthogonal frame: Gram-Schmidt the
  // harmonic basis rationally; then |G_a(i,j)|^2 is an exact rational and the
  // sign is exact.
  const int d = H.dim;
  std::vector<std::vector<Frac>> q;  // coordinates in the harmonic basis
  auto inner = [&](const std::vector<Frac>& x, const std::vector<Frac>& y) {
    Frac s(0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s = s + x[i] * H.gram[i][j] * y[j];
    return s;
  };
  for (int t = 0; t < d; ++t) {
    std::vector<Frac> v(d);
    v[t] = Frac(1);
    for (const auto& prev : q) {
      Frac c = inner(prev, v) / inner(prev, prev);
      for (int i = 0; i < d; ++i) v[i] = v[i] - c * prev[i];
    }
    q.push_back(v);
  }
  for (int ax = 0; ax < 3; ++ax) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        std::vector<Frac> Aqj(d);
        for (int r = 0; r < d; ++r) {
          Frac s(0);
          for (int c = 0; c < d; ++c) s = s + H.A[ax][r][c] * q[j][c];
          Aqj[r] = s;
        }
        Frac num = inner(q[i], Aqj);
        Frac sq = num * num / (inner(q[i], q[i]) * inner(q[j], q[j]));
        double g = rep.generators[ax](i, j);
        CAPTURE(ax, i, j);
        REQUIRE(g * g == Catch::Approx(sq.to_double()).margin(1e-13));
        if (num.zero())
          REQUIRE(std::abs(g) <= 1e-14);
        else
          REQUIRE((num.num > 0) == (g > 0));
      }
  }
}

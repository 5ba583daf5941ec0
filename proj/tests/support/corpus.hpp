#ifndef NULLITYLAB_TESTS_CORPUS_HPP
#define NULLITYLAB_TESTS_CORPUS_HPP

// Shared test corpus: deterministic random matrices (fixed seeds only) and
// cached constructed examples so expensive pipelines run once per binary.

#include <random>

#include "nullitylab/factory.hpp"

namespace corpus {

/** Well-conditioned random SPD matrix from a fixed-seed generator. */
inline nullitylab::Mat random_spd(int m, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  nullitylab::Mat A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = U(rng);
  return nullitylab::Mat(A.transpose() * A / m + nullitylab::Mat::Identity(m, m));
}

inline nullitylab::Vec random_vec(int m, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  nullitylab::Vec v(m);
  for (int i = 0; i < m; ++i) v(i) = U(rng);
  return v;
}

/** Cached constructed examples keyed by (n, v0_dim), default couplings. */
inline const nullitylab::ConstructedExample& example(int n, int v0_dim) {
  static std::map<std::pair<int, int>, nullitylab::ConstructedExample> cache;
  auto key = std::make_pair(n, v0_dim);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, nullitylab::construct_example(n, v0_dim, 0.1, 0.05))
             .first;
  return it->second;
}

}  // namespace corpus

#endif

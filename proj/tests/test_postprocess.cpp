#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sparse_lingam/errors.hpp"
#include "sparse_lingam/postprocess.hpp"
#include "sparse_lingam/synth.hpp"

using namespace sparse_lingam;

namespace {

Matrix random_sparse(int d, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(density);
  std::uniform_real_distribution<double> mag(0.01, 2.0);
  Matrix b = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && keep(rng)) b(i, j) = mag(rng) * (keep(rng) ? 1 : -1);
  return b;
}

}  // namespace

TEST(Permutation, IdentityAndReversal) {
  EXPECT_EQ(best_diagonal_permutation(Matrix::Identity(4, 4)).rows,
            (std::vector<Index>{0, 1, 2, 3}));
  Matrix anti = Matrix::Zero(3, 3);
  anti(0, 2) = anti(1, 1) = anti(2, 0) = 1.0;
  EXPECT_EQ(best_diagonal_permutation(anti).rows, (std::vector<Index>{2, 1, 0}));
}

TEST(Permutation, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 60; ++t) {
    const int d = 2 + t % 7;
    Matrix m = oracle::random_matrix(d, d, rng);
    if (t % 3 == 0) m = m.cwiseProduct(random_sparse(d, 0.5, rng).cwiseAbs());
    const auto perm = best_diagonal_permutation(m);
    EXPECT_NEAR(diagonal_cost(m, perm.rows), oracle::best_permutation_cost(m),
                1e-9 * oracle::best_permutation_cost(m));
  }
}

TEST(Permutation, DegenerateFlag) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 0) = 2.0;
  EXPECT_TRUE(best_diagonal_permutation(m).degenerate);
}

TEST(Rescale, Examples) {
  const auto id = best_diagonal_permutation(2.0 * Matrix::Identity(3, 3));
  EXPECT_EQ(rescale_to_B(2.0 * Matrix::Identity(3, 3), id), Matrix::Zero(3, 3));

  Matrix m(2, 2);
  m << 2, 1, 0, 1;
  const Matrix b = rescale_to_B(m, {{0, 1}, false});
  EXPECT_EQ(b(0, 0), 0.0);
  EXPECT_EQ(b(0, 1), -0.5);

  Matrix z = Matrix::Identity(2, 2);
  z(1, 1) = 0.0;
  try {
    rescale_to_B(z, {{0, 1}, true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate);
  }
}

TEST(Rescale, RecoversKnownB) {
  Matrix b(3, 3);
  b << 0, 0, 0, 0.7, 0, 0, -1.2, 0.5, 0;
  const Matrix m = Matrix::Identity(3, 3) - b;
  EXPECT_LT(max_abs(rescale_to_B(m, best_diagonal_permutation(m)) - b), 1e-15);
}

TEST(Acyclic, Examples) {
  Matrix lower(3, 3);
  lower << 0, 0, 0, 1, 0, 0, 1, 1, 0;
  const auto r = is_acyclic(lower);
  EXPECT_TRUE(r.acyclic);
  EXPECT_EQ(r.order, (std::vector<Index>{0, 1, 2}));
  Matrix two(2, 2);
  two << 0, 1, 1, 0;
  EXPECT_FALSE(is_acyclic(two).acyclic);
}

TEST(Acyclic, GeneratedDagsUnderRelabeling) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto truth = gen_er_graph(8, 10, seed);
    std::mt19937_64 rng(seed);
    std::vector<int> idx(8);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    Eigen::PermutationMatrix<Eigen::Dynamic> p(8);
    for (int i = 0; i < 8; ++i) p.indices()[i] = idx[static_cast<std::size_t>(i)];
    const Matrix b = p.transpose() * truth.b * p;
    const auto r = is_acyclic(b);
    ASSERT_TRUE(r.acyclic);
    std::vector<int> pos(8);
    for (int i = 0; i < 8; ++i) pos[static_cast<std::size_t>(r.order[static_cast<std::size_t>(i)])] = i;
    for (int k = 0; k < 8; ++k)
      for (int j = 0; j < 8; ++j)
        if (b(k, j) != 0.0) EXPECT_LT(pos[static_cast<std::size_t>(j)], pos[static_cast<std::size_t>(k)]);
  }
}

TEST(Acyclic, AgreesWithDfs) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    const int d = 2 + t % 7;
    const Matrix b = random_sparse(d, 0.05 + 0.3 * (t % 5) / 4.0, rng);
    EXPECT_EQ(is_acyclic(b).acyclic, !oracle::has_cycle(b));
  }
}

TEST(Prune, Examples) {
  Matrix dag(2, 2);
  dag << 0, 0, 0.4, 0;
  const auto same = prune_to_dag(dag);
  EXPECT_EQ(same.b, dag);
  EXPECT_EQ(same.cutoff, 0.0);

  Matrix two(2, 2);
  two << 0, 0.01, 0.9, 0;
  const auto cut = prune_to_dag(two);
  EXPECT_EQ(cut.b(0, 1), 0.0);
  EXPECT_EQ(cut.b(1, 0), 0.9);
  EXPECT_EQ(cut.cutoff, 0.01);
}

TEST(Prune, ThreeCycleWithExtraEdges) {
  // 0 -> 1 -> 2 -> 0 with magnitudes 0.1, 0.2, 0.3, plus 0 -> 3 and 1 -> 3.
  Matrix b = Matrix::Zero(4, 4);
  b(1, 0) = 0.1;
  b(2, 1) = 0.2;
  b(0, 2) = 0.3;
  b(3, 0) = 0.05;
  b(3, 1) = 0.7;
  const auto r = prune_to_dag(b);
  Matrix expected = b;
  expected(1, 0) = 0.0;
  expected(3, 0) = 0.0;  // smaller than the cycle edge, so it goes first
  EXPECT_EQ(r.b, expected);
  EXPECT_EQ(r.cutoff, 0.1);

  // Without the small extra edge exactly one (the 0.1) entry is removed,
  // which is also the minimum number of removals.
  b(3, 0) = 0.5;
  const auto r2 = prune_to_dag(b);
  EXPECT_EQ((b - r2.b).cwiseAbs().maxCoeff(), 0.1);
  EXPECT_EQ(((b - r2.b).array() != 0.0).count(), oracle::min_edges_to_remove(b));
}

TEST(Prune, TiesInRowMajorOrder) {
  Matrix b(2, 2);
  b << 0, 0.5, 0.5, 0;
  const auto r = prune_to_dag(b);
  EXPECT_EQ(r.b(0, 1), 0.0);
  EXPECT_EQ(r.b(1, 0), 0.5);
}

TEST(Prune, MatchesSequentialDefinition) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 300; ++t) {
    const int d = 2 + t % 7;
    const Matrix b = random_sparse(d, 0.4, rng);
    const auto r = prune_to_dag(b);
    ASSERT_FALSE(oracle::has_cycle(r.b));
    // Sequential reference: drop the smallest remaining entry until acyclic.
    Matrix s = b;
    double cutoff = 0.0;
    while (oracle::has_cycle(s)) {
      double best = 1e300;
      int bi = -1, bj = -1;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          if (s(i, j) != 0.0 && std::abs(s(i, j)) < best) {
            best = std::abs(s(i, j));
            bi = i;
            bj = j;
          }
      s(bi, bj) = 0.0;
      cutoff = best;
    }
    EXPECT_EQ(r.b, s);
    EXPECT_EQ(r.cutoff, cutoff);
  }
}

TEST(Truncate, Examples) {
  Matrix b(1, 2);
  b << 0.04, 0.06;
  EXPECT_EQ(final_truncate(b, 0.0), b);
  const Matrix t = final_truncate(b, 0.05);
  EXPECT_EQ(t(0, 0), 0.0);
  EXPECT_EQ(t(0, 1), 0.06);
  EXPECT_EQ(final_truncate(b, 1.0), Matrix::Zero(1, 2));
}

TEST(Chain, RecoversPermutedRescaledDags) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int d = 2 + static_cast<int>(seed % 9);
    const auto truth = assign_weights_and_noises(gen_er_graph(d, std::min(d, d * (d - 1) / 2), seed), seed + 7);
    std::mt19937_64 rng(seed);
    std::vector<int> idx(static_cast<std::size_t>(d));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uniform_real_distribution<double> scale(0.2, 3.0);
    const Matrix m = Matrix::Identity(d, d) - truth.b;
    Matrix scrambled(d, d);
    for (int i = 0; i < d; ++i) {
      scrambled.row(i) = m.row(idx[static_cast<std::size_t>(i)]) * scale(rng) * (i % 2 ? -1.0 : 1.0);
    }
    const auto est = postprocess(scrambled, 0.0);
    EXPECT_TRUE(est.acyclic);
    EXPECT_EQ(est.cutoff_applied, 0.0);
    EXPECT_LT(max_abs(est.b - truth.b), 1e-10) << "seed " << seed;
  }
}

TEST(Chain, OrderMakesLowerTriangular) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto est = postprocess(oracle::random_matrix(6, 6, rng), 0.05);
    ASSERT_TRUE(est.acyclic);
    for (Index j = 0; j < 6; ++j) EXPECT_EQ(est.b(j, j), 0.0);
    for (std::size_t a = 0; a < 6; ++a)
      for (std::size_t c = a + 1; c < 6; ++c)
        EXPECT_EQ(est.b(est.causal_order[a], est.causal_order[c]), 0.0);
  }
}

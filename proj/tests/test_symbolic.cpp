#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include <Eigen/Cholesky>

#include "common.hpp"
#include "logdet/errors.hpp"

using namespace logdet;
using testing_util::share;

namespace {

std::vector<int> one_based_parents(const SymbolicAnalysis& s) {
  std::vector<int> p;
  for (int j = 0; j < s.n(); ++j) p.push_back(s.parent(j) + 1);
  return p;
}

}  // namespace

TEST(FillPattern, DiagonalHasNoFill) {
  const auto raw = SparsityPattern::diagonal(6);
  const auto sym = fill_pattern(raw);
  EXPECT_EQ(sym->pattern(), raw);
  for (int j = 0; j < 6; ++j) {
    EXPECT_EQ(sym->parent(j), -1);
    EXPECT_EQ(sym->degree(j), 0);
  }
  EXPECT_EQ(sym->roots().size(), 6u);
}

TEST(FillPattern, Pattern17IsAlreadyFilled) {
  const auto raw = oracle::pattern17();
  const auto sym = fill_pattern(raw);
  EXPECT_EQ(sym->pattern(), raw);
  EXPECT_EQ(sym->parent(4), 8);
  EXPECT_EQ(sym->parent(8), 14);
  EXPECT_EQ(sym->parent(15), 16);
  const auto c5 = sym->pattern().column(4);
  EXPECT_EQ(std::vector<int>(c5.begin(), c5.end()), (std::vector<int>{4, 8, 14, 15}));
}

TEST(FillPattern, MatchesNumericDenseCholeskyStructure) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    oracle::Rng rng(seed);
    const int n = 10;
    std::vector<std::vector<int>> rows(n);
    Eigen::MatrixXd a = n * Eigen::MatrixXd::Identity(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = j + 1; i < n; ++i)
        if (rng.uniform() < 0.2) {
          rows[j].push_back(i);
          a(i, j) = a(j, i) = 1.0;
        }
    const auto raw = SparsityPattern::from_columns(n, rows);
    const auto sym = fill_pattern(raw);
    Eigen::MatrixXd l = a.llt().matrixL();
    for (int j = 0; j < n; ++j)
      for (int i = j; i < n; ++i)
        EXPECT_EQ(sym->pattern().contains(i, j), std::abs(l(i, j)) > 1e-13)
            << "seed " << seed << " at (" << i << "," << j << ")";
  }
}

TEST(FillPattern, PermutedMatchesDenseOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 40;
    oracle::Rng rng(seed);
    std::vector<std::vector<int>> rows(n);
    for (int j = 0; j < n; ++j)
      for (int i = j + 1; i < n; ++i)
        if (rng.uniform() < 0.06) rows[j].push_back(i);
    const auto raw = SparsityPattern::from_columns(n, rows);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int k = n - 1; k > 0; --k) std::swap(order[k], order[rng.below(k + 1)]);
    const auto sym = fill_pattern(raw, order);
    EXPECT_EQ(sym->pattern(), oracle::dense_fill(raw, order));
    EXPECT_EQ(sym->order(), order);
  }
}

TEST(FillPattern, RejectsBadPermutation) {
  const auto raw = SparsityPattern::dense(3);
  const std::vector<int> dup{0, 0, 2}, shortp{0, 1};
  EXPECT_THROW(fill_pattern(raw, dup), InvalidArgument);
  EXPECT_THROW(fill_pattern(raw, shortp), InvalidArgument);
}

TEST(Pattern, RejectsMalformedInput) {
  EXPECT_THROW(SparsityPattern(2, {0, 1, 2}, {0, 0}), InvalidArgument);
  EXPECT_THROW(SparsityPattern(2, {0, 2, 3}, {1, 0, 1}), InvalidArgument);
  EXPECT_THROW(SparsityPattern(3, {0, 3, 4, 5}, {0, 2, 1, 1, 2}), InvalidArgument);
  EXPECT_THROW(SparsityPattern::from_columns(2, {{0, 1, 1}, {1}}), InvalidArgument);
}

TEST(EtreeOnly, Pattern17Parents) {
  const auto sym = etree_only(oracle::pattern17());
  EXPECT_EQ(one_based_parents(*sym),
            (std::vector<int>{3, 3, 4, 5, 9, 9, 8, 9, 15, 11, 13, 13, 14, 16, 16, 17, 0}));
}

TEST(EtreeOnly, FourCycleIsNotChordal) {
  const auto p = SparsityPattern::from_columns(4, {{1, 3}, {2}, {3}, {}});
  const auto viol = oracle::fill_violations(p);
  ASSERT_EQ(viol.size(), 1u);
  try {
    etree_only(p);
    FAIL() << "expected NotChordal";
  } catch (const NotChordal& e) {
    EXPECT_EQ(e.i(), viol[0][0]);
    EXPECT_EQ(e.j(), viol[0][1]);
    EXPECT_EQ(e.k(), viol[0][2]);
    EXPECT_EQ(e.i(), 3);
    EXPECT_EQ(e.j(), 1);
    EXPECT_EQ(e.k(), 0);
  }
}

TEST(EtreeOnly, DensePatternIsAChain) {
  const auto sym = etree_only(SparsityPattern::dense(5));
  for (int k = 0; k < 4; ++k) EXPECT_EQ(sym->parent(k), k + 1);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(sym->degree(k), 5 - (k + 1));
}

TEST(EtreeOnly, ReportsAViolationOfRandomNonFilledPatterns) {
  int rejected = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    oracle::Rng rng(seed);
    const int n = 25;
    std::vector<std::vector<int>> rows(n);
    for (int j = 0; j < n; ++j)
      for (int i = j + 1; i < n; ++i)
        if (rng.uniform() < 0.1) rows[j].push_back(i);
    const auto p = SparsityPattern::from_columns(n, rows);
    const auto viol = oracle::fill_violations(p);
    if (viol.empty()) {
      EXPECT_NO_THROW(etree_only(p));
      continue;
    }
    ++rejected;
    try {
      etree_only(p);
      FAIL();
    } catch (const NotChordal& e) {
      const std::array<int, 3> w{e.i(), e.j(), e.k()};
      EXPECT_NE(std::find(viol.begin(), viol.end(), w), viol.end());
    }
  }
  EXPECT_GT(rejected, 0);
}

TEST(MonotoneDegrees, Pattern17) {
  const auto d = monotone_degrees(*etree_only(oracle::pattern17()));
  EXPECT_EQ(d, (std::vector<int>{1, 2, 3, 2, 3, 2, 3, 2, 2, 4, 3, 4, 3, 2, 2, 1, 0}));
}

TEST(MonotoneDegrees, Diagonal) {
  const auto d = monotone_degrees(*etree_only(SparsityPattern::diagonal(7)));
  EXPECT_EQ(d, std::vector<int>(7, 0));
}

TEST(MonotoneDegrees, Band) {
  const auto d = monotone_degrees(*etree_only(oracle::band_pattern(2000, 10)));
  for (int k = 1; k <= 2000; ++k) EXPECT_EQ(d[k - 1], k <= 1990 ? 10 : 2000 - k);
}

namespace {

// Full n-by-n matrix with block b placed at rows/cols idx.
Eigen::MatrixXd scatter(int n, const Eigen::MatrixXd& b, std::span<const int> idx) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t c = 0; c < idx.size(); ++c)
    for (std::size_t r = 0; r < idx.size(); ++r) out(idx[r], idx[c]) = b(r, c);
  return out;
}

Eigen::MatrixXd random_sym(int m, std::uint64_t seed) {
  oracle::Rng rng(seed);
  Eigen::MatrixXd a(m, m);
  for (int c = 0; c < m; ++c)
    for (int r = c; r < m; ++r) a(r, c) = a(c, r) = rng.uniform(-1, 1);
  return a;
}

}  // namespace

TEST(ExtendAdd, EmptyUpdateLeavesFrontUnchanged) {
  Eigen::MatrixXd f = random_sym(4, 1), g = f;
  extend_add(f, Eigen::MatrixXd(0, 0), {});
  EXPECT_EQ(f, g);
  EXPECT_EQ(extract(f, {}).size(), 0);
}

TEST(ExtendAdd, Pattern17MapsMatchDenseScatter) {
  const auto sym = etree_only(oracle::pattern17());
  const int n = sym->n();
  for (int i = 0; i < n; ++i) {
    const int j = sym->parent(i);
    if (j < 0) continue;
    const auto ij = sym->pattern().column(j);
    const auto ii = sym->pattern().below(i);
    const Eigen::MatrixXd front = random_sym(ij.size(), 10 + i);
    const Eigen::MatrixXd upd = random_sym(ii.size(), 100 + i);
    Eigen::MatrixXd got = front;
    extend_add(got, upd, sym->relmap(i));
    const Eigen::MatrixXd want = scatter(n, front, ij) + scatter(n, upd, ii);
    EXPECT_LT(testing_util::rel(scatter(n, got, ij), want), 1e-15);

    const Eigen::MatrixXd ex = extract(front, sym->relmap(i));
    for (std::size_t c = 0; c < ii.size(); ++c)
      for (std::size_t r = 0; r < ii.size(); ++r)
        EXPECT_EQ(ex(r, c), scatter(n, front, ij)(ii[r], ii[c]));
  }
  // Vertex 5's front receives the update of vertex 4 (1-based) in rows 1 and 3.
  const auto m = sym->relmap(3);
  EXPECT_EQ(std::vector<int>(m.begin(), m.end()), (std::vector<int>{0, 2}));
}

TEST(ExtendAdd, FullMapIsIdentity) {
  const Eigen::MatrixXd f = random_sym(5, 3);
  const std::vector<int> id{0, 1, 2, 3, 4};
  EXPECT_EQ(extract(f, id), f);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(5, 5);
  extend_add(z, f, id);
  EXPECT_EQ(z, f);
}

TEST(ExtendAdd, RejectsDimensionMismatch) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(3, 3);
  const std::vector<int> m{0, 2};
  EXPECT_THROW(extend_add(f, Eigen::MatrixXd::Zero(3, 3), m), InvalidArgument);
  const std::vector<int> bad{0, 3};
  EXPECT_THROW(extend_add(f, Eigen::MatrixXd::Zero(2, 2), bad), InvalidArgument);
  EXPECT_THROW(extract(f, bad), InvalidArgument);
}

TEST(ExtendAdd, AdjointOfExtract) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    oracle::Rng rng(seed);
    const int big = 3 + rng.below(8);
    std::vector<int> map;
    for (int a = 0; a < big; ++a)
      if (rng.uniform() < 0.5) map.push_back(a);
    const Eigen::MatrixXd u = random_sym(map.size(), seed + 50);
    const Eigen::MatrixXd w = random_sym(big, seed + 90);
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(big, big);
    extend_add(e, u, map);
    const double lhs = (e * w).trace();
    const double rhs = (u * extract(w, map)).trace();
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(SymbolicProperties, RandomFilledPatterns) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int n = 20 + static_cast<int>(seed * 37 % 181);
    oracle::Rng rng(seed);
    std::vector<std::vector<int>> rows(n);
    for (int j = 0; j < n; ++j)
      for (int i = j + 1; i < n; ++i)
        if (rng.uniform() < 2.0 / n) rows[j].push_back(i);
    const auto sym = fill_pattern(SparsityPattern::from_columns(n, rows));
    const auto& v = sym->pattern();
    EXPECT_TRUE(oracle::fill_violations(v).empty());

    std::vector<int> pos(n);
    for (int k = 0; k < n; ++k) pos[sym->postorder()[k]] = k;
    for (int k = 0; k < n; ++k) {
      const int p = sym->parent(k);
      if (v.below(k).empty()) {
        EXPECT_EQ(p, -1);
        continue;
      }
      EXPECT_EQ(p, v.below(k).front());
      EXPECT_LT(pos[k], pos[p]);
      EXPECT_LE(sym->degree(k), sym->degree(p) + 1);
      // Every j in I_k is an ancestor of k.
      for (int j : v.below(k)) {
        int a = k;
        while (a >= 0 && a != j) a = sym->parent(a);
        EXPECT_EQ(a, j);
      }
    }
    const auto again = fill_pattern(v);
    EXPECT_EQ(again->pattern(), v);
  }
}

TEST(Embed, PermutesOntoFilledPattern) {
  const auto raw = share(SparsityPattern::from_columns(4, {{3}, {3}, {3}, {}}));
  SparseSymMatrix a(raw);
  for (std::size_t q = 0; q < a.values().size(); ++q) a.values()[q] = q + 1.0;
  const std::vector<int> order{3, 0, 1, 2};
  const auto sym = fill_pattern(*raw, order);
  const auto e = embed(a, *sym);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(e(i, j), a(order[i], order[j]));
}

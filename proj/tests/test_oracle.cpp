#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "common.hpp"
#include "logdet/errors.hpp"
#include "logdet/multifrontal.hpp"

using namespace logdet;
using namespace logdet::oracle;
using testing_util::share;

namespace {

double min_eig(const Eigen::MatrixXd& a) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().minCoeff();
}

}  // namespace

TEST(DenseProject, CopiesEntriesOnPattern) {
  const auto v = share(pattern17());
  const auto id = dense_project(Eigen::MatrixXd::Identity(17, 17), v);
  EXPECT_EQ(id.values(), SparseSymMatrix::identity(v).values());

  Rng rng(3);
  Eigen::MatrixXd a(17, 17);
  for (int j = 0; j < 17; ++j)
    for (int i = j; i < 17; ++i) a(i, j) = a(j, i) = rng.uniform(-1, 1);
  const auto p = dense_project(a, v);
  // 1-based (15,3), (17,10), (9,6).
  EXPECT_EQ(p(14, 2), a(14, 2));
  EXPECT_EQ(p(16, 9), a(16, 9));
  EXPECT_EQ(p(8, 5), a(8, 5));
  const auto full = share(dense_fill(band_pattern(6, 5)));
  Eigen::MatrixXd b = a.topLeftCorner(6, 6);
  EXPECT_EQ(to_dense(dense_project(b, full)), b);
}

TEST(Coordinates, RoundTripAndInnerProduct) {
  const auto v = share(pattern17());
  const auto a = gen_direction(v, 1), b = gen_direction(v, 2);
  EXPECT_LT(relative_difference(from_coords(to_coords(a), v), a), 1e-15);
  EXPECT_NEAR(to_coords(a).dot(to_coords(b)), inner(a, b), 1e-12);
  EXPECT_NEAR(inner(a, b), (to_dense(a) * to_dense(b)).trace(), 1e-12);
}

TEST(DenseHessianMatrix, IdentityPoint) {
  const auto v = pattern17();
  const auto h = dense_hessian_matrix(Eigen::MatrixXd::Identity(17, 17), v);
  EXPECT_LT((h - Eigen::MatrixXd::Identity(v.nnz(), v.nnz())).norm(), 1e-15);
}

TEST(DenseHessianMatrix, SymmetricPositiveAndConsistent) {
  const auto v = share(pattern17());
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto x = to_dense(gen_spd(v, seed));
    const auto h = dense_hessian_matrix(x, *v);
    EXPECT_LT((h - h.transpose()).norm(), 1e-12 * h.norm());
    EXPECT_GT(min_eig(h), 0.0);
    const auto y = gen_direction(v, seed + 10);
    const auto xi = dense_inverse(x);
    const auto want = dense_project(xi * to_dense(y) * xi, v);
    EXPECT_LT(relative_difference(from_coords(h * to_coords(y), v), want), 1e-12);
  }
}

TEST(DenseLdl, MatchesReconstructionAndRejectsIndefinite) {
  const auto x = to_dense(gen_spd(share(pattern17()), 4));
  const auto f = dense_ldl(x);
  EXPECT_LT((f.l * f.d.asDiagonal() * f.l.transpose() - x).norm(), 1e-13);
  EXPECT_NEAR(dense_logdet(x), std::log(x.determinant()), 1e-12);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  bad(1, 0) = bad(0, 1) = 2.0;
  EXPECT_THROW(dense_ldl(bad), IndefiniteAtProbe);
}

TEST(GenChordal, ExtremesAndFilled) {
  EXPECT_EQ(gen_chordal(10, 0.0, 1).nnz(), 10u);
  EXPECT_EQ(gen_chordal(10, 1.0, 1).nnz(), 55u);
  const auto p = gen_chordal(50, 0.05, 7);
  EXPECT_TRUE(fill_violations(p).empty());
  EXPECT_NO_THROW(etree_only(share(p)));
  EXPECT_EQ(gen_chordal(50, 0.05, 7).rowind(), p.rowind());
}

TEST(FillViolations, FourCycle) {
  const auto p = SparsityPattern::from_columns(4, {{0, 1, 3}, {1, 2}, {2, 3}, {3}});
  const auto v = fill_violations(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], (std::array<int, 3>{3, 1, 0}));
  EXPECT_TRUE(fill_violations(dense_fill(p)).empty());
}

TEST(GenSpd, PositiveDefiniteAndDeterministic) {
  const auto diag = share(SparsityPattern::diagonal(5));
  const auto d = gen_spd(diag, 1);
  for (double e : d.values()) {
    EXPECT_GE(e, 0.5);
    EXPECT_LE(e, 2.0);
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto v = share(testing_util::random_chordal(100, seed));
    const auto x = gen_spd(v, seed);
    EXPECT_GT(min_eig(to_dense(x)), 0.0);
    EXPECT_EQ(gen_spd(v, seed).values(), x.values());
  }
}

TEST(GenCompletable, CompletionSucceeds) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto v = share(testing_util::random_chordal(static_cast<int>(10 + seed % 90), seed));
    const auto s = gen_completable(v, seed);
    EXPECT_NO_THROW(completion(s, etree_only(v))) << seed;
  }
}

TEST(FiniteDifferences, GradientAndSecondOrderError) {
  const auto v = share(pattern17());
  const auto x = gen_spd(v, 2);
  const auto want = dense_project(-dense_inverse(to_dense(x)), v);
  EXPECT_LT(relative_difference(finite_diff_gradient(x, 1e-5), want), 1e-7);

  const auto id = SparseSymMatrix::identity(v);
  EXPECT_LT(relative_difference(finite_diff_hessian(id, id), id), 1e-7);

  // Halving the step cuts the error by about four.
  const auto y = gen_direction(v, 3);
  const auto xi = dense_inverse(to_dense(x));
  const auto exact = dense_project(xi * to_dense(y) * xi, v);
  const double e1 = relative_difference(finite_diff_hessian(x, y, 0.02), exact);
  const double e2 = relative_difference(finite_diff_hessian(x, y, 0.01), exact);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

TEST(FiniteDifferences, ProbeOutsideTheCone) {
  const auto v = share(pattern17());
  const auto id = SparseSymMatrix::identity(v);
  EXPECT_THROW(finite_diff_hessian(id, id, 2.0), IndefiniteAtProbe);
}

TEST(Rng, PortableDraws) {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

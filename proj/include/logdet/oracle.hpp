#pragma once

// Dense reference implementations and instance generators. Nothing here calls
// the sparse recursions, so the tests can use these as independent oracles.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "logdet/errors.hpp"
#include "logdet/pattern.hpp"

namespace logdet::oracle {

// Full symmetric storage.
using DenseSym = Eigen::MatrixXd;

// Finite-difference probe left the positive definite cone.
class IndefiniteAtProbe : public Error {
 public:
  IndefiniteAtProbe() : Error("finite-difference probe point is not positive definite") {}
};

// Seeded generator with portable uniform draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int below(int n) { return static_cast<int>(g_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 g_;
};

DenseSym to_dense(const SparseSymMatrix& a);
SparseSymMatrix dense_project(const DenseSym& a, const PatternPtr& v);

// Coordinates of A in the basis where off-diagonal elements carry a factor
// sqrt(2), so that inner(A, B) is the dot product of coordinates.
Eigen::VectorXd to_coords(const SparseSymMatrix& a);
SparseSymMatrix from_coords(const Eigen::VectorXd& c, const PatternPtr& v);

// Matrix of Y -> P(X^{-1} Y X^{-1}) in the coordinates above.
Eigen::MatrixXd dense_hessian_matrix(const DenseSym& x, const SparsityPattern& v);

struct DenseLdl {
  Eigen::MatrixXd l;  // unit lower triangular
  Eigen::VectorXd d;
};
// Unpivoted LDL^T by plain elimination; throws IndefiniteAtProbe on a
// non-positive pivot.
DenseLdl dense_ldl(const DenseSym& x);
double dense_logdet(const DenseSym& x);
DenseSym dense_inverse(const DenseSym& x);

// Pattern of the Cholesky factor of P A P^T (order[k] = vertex placed at k),
// by dense boolean elimination.
SparsityPattern dense_fill(const SparsityPattern& raw, std::span<const int> order);
SparsityPattern dense_fill(const SparsityPattern& raw);

// Every violating triple (i, j, k), i > j > k, of the fill property, in
// increasing (k, j, i) order.
std::vector<std::array<int, 3>> fill_violations(const SparsityPattern& v);

// Random pattern with each lower off-diagonal position present with
// probability `density`, followed by symbolic fill.
SparsityPattern gen_chordal(int n, double density, std::uint64_t seed);

// X = L D L^T with random unit lower L on the filled pattern v and D in
// [0.5, 2].
SparseSymMatrix gen_spd(const PatternPtr& v, std::uint64_t seed);

// P(Z) with Z = I + B B^T / r for a random n-by-r B, r = min(n, 32).
SparseSymMatrix gen_completable(const PatternPtr& v, std::uint64_t seed);

// Random matrix on v with entries in [-1, 1].
SparseSymMatrix gen_direction(const PatternPtr& v, std::uint64_t seed);

// Gradient of f(X) = -log det X by central differences of f along each
// coordinate.
SparseSymMatrix finite_diff_gradient(const SparseSymMatrix& x, double step);

// (grad f(X + tY) - grad f(X - tY)) / 2t with the gradient -P(X^{-1})
// evaluated densely. A non-positive step selects the default
// 1e-4 ||X|| / ||Y||.
SparseSymMatrix finite_diff_hessian(const SparseSymMatrix& x,
                                    const SparseSymMatrix& y, double step = 0.0);

SparsityPattern band_pattern(int n, int w);
// Diagonal plus the last w rows in full.
SparsityPattern arrow_pattern(int n, int w);
// The 17-vertex filled pattern used throughout the fixtures.
SparsityPattern pattern17();

}  // namespace logdet::oracle

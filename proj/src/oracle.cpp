#include "logdet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

namespace logdet::oracle {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

bool is_pd(const DenseSym& x) {
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  return llt.info() == Eigen::Success;
}

// -P(X^{-1}).
SparseSymMatrix dense_gradient(const DenseSym& x, const PatternPtr& v) {
  if (!is_pd(x)) throw IndefiniteAtProbe();
  DenseSym g = -dense_inverse(x);
  return dense_project(g, v);
}

SparsityPattern from_bool(const std::vector<std::vector<char>>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<int>> rows(n);
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i)
      if (i == j || a[i][j]) rows[j].push_back(i);
  return SparsityPattern::from_columns(n, rows);
}

SparseSymMatrix scaled(SparseSymMatrix a, double t) {
  for (double& e : a.values()) e *= t;
  return a;
}

}  // namespace

DenseSym to_dense(const SparseSymMatrix& a) {
  const auto& p = a.pattern();
  DenseSym d = DenseSym::Zero(p.n(), p.n());
  for (int j = 0; j < p.n(); ++j)
    for (int q = p.col_begin(j); q < p.col_end(j); ++q) {
      const int i = p.rowind()[q];
      d(i, j) = d(j, i) = a.values()[q];
    }
  return d;
}

SparseSymMatrix dense_project(const DenseSym& a, const PatternPtr& v) {
  SparseSymMatrix out(v);
  for (int j = 0; j < v->n(); ++j)
    for (int q = v->col_begin(j); q < v->col_end(j); ++q)
      out.values()[q] = a(v->rowind()[q], j);
  return out;
}

Eigen::VectorXd to_coords(const SparseSymMatrix& a) {
  const auto& p = a.pattern();
  Eigen::VectorXd c(p.nnz());
  for (int j = 0; j < p.n(); ++j)
    for (int q = p.col_begin(j); q < p.col_end(j); ++q)
      c[q] = (q == p.col_begin(j) ? 1.0 : kSqrt2) * a.values()[q];
  return c;
}

SparseSymMatrix from_coords(const Eigen::VectorXd& c, const PatternPtr& v) {
  SparseSymMatrix a(v);
  for (int j = 0; j < v->n(); ++j)
    for (int q = v->col_begin(j); q < v->col_end(j); ++q)
      a.values()[q] = (q == v->col_begin(j) ? 1.0 : 1.0 / kSqrt2) * c[q];
  return a;
}

Eigen::MatrixXd dense_hessian_matrix(const DenseSym& x, const SparsityPattern& v) {
  const DenseSym xi = dense_inverse(x);
  const auto nnz = static_cast<Eigen::Index>(v.nnz());
  struct Pos {
    int i, j;
  };
  std::vector<Pos> pos(nnz);
  for (int j = 0; j < v.n(); ++j)
    for (int q = v.col_begin(j); q < v.col_end(j); ++q) pos[q] = {v.rowind()[q], j};
  // Basis element q is e_i e_j^T + e_j e_i^T scaled by 1/sqrt(2) off the
  // diagonal and e_j e_j^T on it; H_pq = <E_p, X^{-1} E_q X^{-1}>.
  auto entry = [&](int a, int b, int c, int d) {
    // (X^{-1} (e_c e_d^T) X^{-1})_{ab}
    return xi(a, c) * xi(d, b);
  };
  Eigen::MatrixXd h(nnz, nnz);
  for (Eigen::Index p = 0; p < nnz; ++p) {
    const auto [a, b] = pos[p];
    for (Eigen::Index q = 0; q < nnz; ++q) {
      const auto [c, d] = pos[q];
      double t;
      if (c == d) {
        t = entry(a, b, c, c);
      } else {
        t = (entry(a, b, c, d) + entry(a, b, d, c)) / kSqrt2;
      }
      // <E_p, M> = M_aa on the diagonal, sqrt(2) M_ab off it.
      h(p, q) = (a == b) ? t : kSqrt2 * t;
    }
  }
  return h;
}

DenseLdl dense_ldl(const DenseSym& x) {
  const Eigen::Index n = x.rows();
  DenseSym a = x;
  DenseLdl r{Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const double d = a(k, k);
    if (!(d > 0.0)) throw IndefiniteAtProbe();
    r.d[k] = d;
    for (Eigen::Index i = k + 1; i < n; ++i) r.l(i, k) = a(i, k) / d;
    for (Eigen::Index j = k + 1; j < n; ++j)
      for (Eigen::Index i = k + 1; i < n; ++i) a(i, j) -= r.l(i, k) * d * r.l(j, k);
  }
  return r;
}

double dense_logdet(const DenseSym& x) {
  const auto f = dense_ldl(x);
  return f.d.array().log().sum();
}

DenseSym dense_inverse(const DenseSym& x) {
  DenseSym xi = x.ldlt().solve(DenseSym::Identity(x.rows(), x.cols()));
  return (xi + xi.transpose()) / 2;
}

SparsityPattern dense_fill(const SparsityPattern& raw, std::span<const int> order) {
  const int n = raw.n();
  std::vector<int> pos(n);
  for (int k = 0; k < n; ++k) pos[order[k]] = k;
  std::vector<std::vector<char>> a(n, std::vector<char>(n, 0));
  for (int j = 0; j < n; ++j)
    for (int i : raw.below(j)) {
      const int r = std::max(pos[i], pos[j]), c = std::min(pos[i], pos[j]);
      a[r][c] = 1;
    }
  for (int k = 0; k < n; ++k)
    for (int j = k + 1; j < n; ++j) {
      if (!a[j][k]) continue;
      for (int i = j + 1; i < n; ++i)
        if (a[i][k]) a[i][j] = 1;
    }
  return from_bool(a);
}

SparsityPattern dense_fill(const SparsityPattern& raw) {
  std::vector<int> id(raw.n());
  std::iota(id.begin(), id.end(), 0);
  return dense_fill(raw, id);
}

std::vector<std::array<int, 3>> fill_violations(const SparsityPattern& v) {
  std::vector<std::array<int, 3>> out;
  for (int k = 0; k < v.n(); ++k) {
    const auto col = v.below(k);
    for (std::size_t b = 0; b < col.size(); ++b)
      for (std::size_t a = b + 1; a < col.size(); ++a)
        if (!v.contains(col[a], col[b])) out.push_back({col[a], col[b], k});
  }
  return out;
}

SparsityPattern gen_chordal(int n, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<int>> rows(n);
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i)
      if (rng.uniform() < density) rows[j].push_back(i);
  return dense_fill(SparsityPattern::from_columns(n, rows));
}

SparseSymMatrix gen_spd(const PatternPtr& v, std::uint64_t seed) {
  Rng rng(seed);
  const int n = v->n();
  std::vector<double> l(v->nnz());
  std::vector<double> d(n);
  for (int j = 0; j < n; ++j) {
    d[j] = rng.uniform(0.5, 2.0);
    const double scale = 0.5 / std::sqrt(v->col_end(j) - v->col_begin(j));
    for (int q = v->col_begin(j) + 1; q < v->col_end(j); ++q)
      l[q] = scale * rng.uniform(-1.0, 1.0);
  }
  // X = sum_k d_k l_k l_k^T, each term supported on I'_k x I'_k.
  SparseSymMatrix x(v);
  for (int k = 0; k < n; ++k) {
    const auto col = v->column(k);
    const int b = v->col_begin(k);
    for (std::size_t s = 0; s < col.size(); ++s) {
      const double ls = s == 0 ? 1.0 : l[b + s];
      for (std::size_t r = s; r < col.size(); ++r) {
        const double lr = r == 0 ? 1.0 : l[b + r];
        x.ref(col[r], col[s]) += d[k] * lr * ls;
      }
    }
  }
  return x;
}

SparseSymMatrix gen_completable(const PatternPtr& v, std::uint64_t seed) {
  Rng rng(seed);
  const int n = v->n();
  const int r = std::min(n, 32);
  Eigen::MatrixXd b(n, r);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < r; ++k) b(i, k) = rng.uniform(-1.0, 1.0) * std::sqrt(3.0);
  SparseSymMatrix s(v);
  for (int j = 0; j < n; ++j)
    for (int q = v->col_begin(j); q < v->col_end(j); ++q) {
      const int i = v->rowind()[q];
      s.values()[q] = (i == j ? 1.0 : 0.0) + b.row(i).dot(b.row(j)) / r;
    }
  return s;
}

SparseSymMatrix gen_direction(const PatternPtr& v, std::uint64_t seed) {
  Rng rng(seed);
  SparseSymMatrix y(v);
  for (double& e : y.values()) e = rng.uniform(-1.0, 1.0);
  return y;
}

SparseSymMatrix finite_diff_gradient(const SparseSymMatrix& x, double step) {
  const auto& v = x.pattern();
  const DenseSym xd = to_dense(x);
  SparseSymMatrix g(x.pattern_ptr());
  auto f = [](const DenseSym& a) {
    if (!is_pd(a)) throw IndefiniteAtProbe();
    return -dense_logdet(a);
  };
  for (int j = 0; j < v.n(); ++j)
    for (int q = v.col_begin(j); q < v.col_end(j); ++q) {
      const int i = v.rowind()[q];
      DenseSym plus = xd, minus = xd;
      plus(i, j) += step;
      minus(i, j) -= step;
      if (i != j) {
        plus(j, i) += step;
        minus(j, i) -= step;
      }
      const double deriv = (f(plus) - f(minus)) / (2 * step);
      g.values()[q] = i == j ? deriv : deriv / 2;
    }
  return g;
}

SparseSymMatrix finite_diff_hessian(const SparseSymMatrix& x,
                                    const SparseSymMatrix& y, double step) {
  if (step <= 0.0) step = 1e-4 * norm(x) / norm(y);
  const DenseSym xd = to_dense(x), yd = to_dense(y);
  const auto gp = dense_gradient(xd + step * yd, x.pattern_ptr());
  const auto gm = dense_gradient(xd - step * yd, x.pattern_ptr());
  return scaled(axpy(gp, -1.0, gm), 0.5 / step);
}

SparsityPattern band_pattern(int n, int w) {
  std::vector<std::vector<int>> rows(n);
  for (int j = 0; j < n; ++j)
    for (int i = j; i <= std::min(n - 1, j + w); ++i) rows[j].push_back(i);
  return SparsityPattern::from_columns(n, rows);
}

SparsityPattern arrow_pattern(int n, int w) {
  std::vector<std::vector<int>> rows(n);
  for (int j = 0; j < n; ++j) {
    rows[j].push_back(j);
    for (int i = std::max(j + 1, n - w); i < n; ++i) rows[j].push_back(i);
  }
  return SparsityPattern::from_columns(n, rows);
}

SparsityPattern pattern17() {
  // Rows below the diagonal, 1-based.
  const std::vector<std::vector<int>> below = {
      {3},         {3, 4},          {4, 5, 15},     {5, 15},
      {9, 15, 16}, {9, 16},         {8, 9, 15},     {9, 15},
      {15, 16},    {11, 13, 14, 17}, {13, 14, 17},  {13, 14, 16, 17},
      {14, 16, 17}, {16, 17},       {16, 17},       {17},
      {}};
  std::vector<std::vector<int>> rows(17);
  for (int j = 0; j < 17; ++j)
    for (int i : below[j]) rows[j].push_back(i - 1);
  return SparsityPattern::from_columns(17, rows);
}

}  // namespace logdet::oracle

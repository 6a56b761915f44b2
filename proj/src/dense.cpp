#include "logdet/dense.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Cholesky>

namespace logdet::dense {

bool upper_factor(const Eigen::Ref<const Eigen::MatrixXd>& v,
                  Eigen::Ref<Eigen::MatrixXd> r) {
  const Eigen::Index m = v.rows();
  if (m == 0) return true;
  // With J the reversal permutation, J V J = G G^T gives V = (J G J)(J G J)^T
  // and J G J is upper triangular.
  Eigen::MatrixXd rev(m, m);
  for (Eigen::Index b = 0; b < m; ++b)
    for (Eigen::Index a = b; a < m; ++a) rev(m - 1 - b, m - 1 - a) = v(a, b);
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(rev);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::MatrixXd g = llt.matrixL();
  for (Eigen::Index b = 0; b < m; ++b)
    for (Eigen::Index a = 0; a < m; ++a)
      r(a, b) = (a <= b) ? g(m - 1 - a, m - 1 - b) : 0.0;
  for (Eigen::Index k = 0; k < m; ++k)
    if (!(r(k, k) > 0.0)) return false;
  return true;
}

int retriangularize_rows(const Eigen::Ref<const Eigen::MatrixXd>& r,
                         std::span<const int> kept,
                         Eigen::Ref<Eigen::MatrixXd> out) {
  const int n = static_cast<int>(r.rows());
  const int m = static_cast<int>(kept.size());
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor c = RowMajor::Zero(m, n);
  for (int t = 0; t < m; ++t)
    for (int col = kept[t]; col < n; ++col) c(t, col) = r(kept[t], col);

  int reflections = 0;
  std::vector<double> v;
  for (int t = m - 1; t >= 0; --t) {
    const int lo = kept[t], hi = n - m + t;
    if (lo == hi) continue;
    const int len = hi - lo + 1;
    double* x = &c(t, lo);
    double sigma = 0.0;
    for (int k = 0; k < len - 1; ++k) sigma += x[k] * x[k];
    if (sigma == 0.0) continue;
    // Reflector H = I - tau v v^T with x H = beta e_last.
    const double last = x[len - 1];
    const double beta = -std::copysign(std::sqrt(sigma + last * last), last);
    v.assign(x, x + len);
    v[len - 1] -= beta;
    double vv = 0.0;
    for (double e : v) vv += e * e;
    const double tau = 2.0 / vv;
    for (int s = 0; s < t; ++s) {
      double* y = &c(s, lo);
      double dot = 0.0;
      for (int k = 0; k < len; ++k) dot += y[k] * v[k];
      dot *= tau;
      for (int k = 0; k < len; ++k) y[k] -= dot * v[k];
    }
    for (int k = 0; k < len - 1; ++k) x[k] = 0.0;
    x[len - 1] = beta;
    ++reflections;
  }

  out = c.rightCols(m);
  for (int k = 0; k < m; ++k)
    if (out(k, k) < 0.0) out.col(k).head(k + 1) *= -1.0;
  return reflections;
}

}  // namespace logdet::dense

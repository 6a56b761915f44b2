#include "logdet/hessian.hpp"

#include <algorithm>
#include <cmath>

#include "frontal.hpp"
#include "logdet/errors.hpp"

namespace logdet {

using detail::BlockMap;
using detail::ConstVecMap;
using detail::MatMap;
using detail::VecMap;

HessianContext::HessianContext(const SparseSymMatrix& x, SymbolicPtr sym)
    : HessianContext(factor(x, sym)) {}

HessianContext::HessianContext(CholeskyFactor f)
    : f_(std::move(f)), s_(projected_inverse(f_)) {
  r_off_.assign(f_.sym->n() + 1, 0);
  for (int j = 0; j < f_.sym->n(); ++j) {
    const std::size_t q = f_.sym->degree(j);
    r_off_[j + 1] = r_off_[j] + q * q;
  }
}

HessianContext::HessianContext(CholeskyFactor f, SparseSymMatrix s)
    : HessianContext(std::move(f)) {
  detail::require_pattern(s.pattern(), *f_.sym, "HessianContext");
  if (relative_difference(s, s_) > 1e-10)
    throw InvalidArgument("HessianContext: S is not the projected inverse of the factor");
  s_ = std::move(s);
}

void HessianContext::build() const {
  const auto& sym = *f_.sym;
  r_.assign(r_off_.back(), 0.0);
  double smax = 0.0;
  for (int j = 0; j < sym.n(); ++j) smax = std::max(smax, s_.diag(j));
  detail::factor_sweep(
      sym, s_.values(), 1e-14 * smax, nullptr,
      [&](int j, detail::ConstMatMap r, ConstVecMap, double) {
        std::copy(r.data(), r.data() + r.size(), r_.data() + r_off_[j]);
      },
      [](int j) { throw NumericalBreakdown(j, "factorization of S_{I_j I_j} failed"); });
  built_ = true;
}

void HessianContext::warm() const {
  std::call_once(once_, [this] { build(); });
}

Eigen::Map<const Eigen::MatrixXd> HessianContext::r(int j) const {
  warm();
  const int q = f_.sym->degree(j);
  return {r_.data() + r_off_[j], q, q};
}

namespace {

// Step 1 of the Hessian recursions (linearized factorization): K from Y over
// the given postordered vertex subset.
void linearized_factor(const HessianContext& ctx, const SparseSymMatrix& y,
                       std::span<const int> nodes, std::vector<double>& k) {
  const auto& sym = ctx.sym();
  const auto& pat = sym.pattern();
  const auto& fv = ctx.chol().values;
  detail::forward_sweep(sym, nodes, [&](int j, double* f, int m) {
    const int b = pat.col_begin(j), q = m - 1;
    const double* yc = y.values().data() + b;
    for (int a = 0; a < m; ++a) f[a] += yc[a];
    ConstVecMap l(fv.data() + b + 1, q);
    const double f11 = f[0];
    k[b] = f11;
    VecMap kv(k.data() + b + 1, q);
    kv = ConstVecMap(f + 1, q) - f11 * l;
    if (q == 0) return;
    auto u = detail::trailing(f, m).selfadjointView<Eigen::Lower>();
    u.rankUpdate(l, kv, -1.0);
    u.rankUpdate(l, -f11);
  });
}

// Step 3 (linearized projected inverse): T from M, reverse topological order.
SparseSymMatrix linearized_projinv(const HessianContext& ctx, const std::vector<double>& mv) {
  const auto& sym = ctx.sym();
  const auto& pat = sym.pattern();
  const auto& fv = ctx.chol().values;
  SparseSymMatrix t(sym.pattern_ptr());
  Eigen::VectorXd bl;
  detail::reverse_sweep(sym, 1, detail::lower_gather(sym, 1),
                        [&](int j, double* w, double* front, int m) {
                          const int b = pat.col_begin(j), q = m - 1;
                          ConstVecMap l(fv.data() + b + 1, q);
                          MatMap bm(w, q, q);
                          ConstVecMap mi(mv.data() + b + 1, q);
                          bl.noalias() = bm.selfadjointView<Eigen::Lower>() * l;
                          double* out = t.values().data() + b;
                          out[0] = mv[b] - 2.0 * l.dot(mi) + l.dot(bl);
                          VecMap(out + 1, q) = mi - bl;
                          if (!front) return;
                          std::copy(out, out + m, front);
                          detail::copy_lower(w, q, front + 1 + m, m, q);
                        });
  return t;
}

void check(const HessianContext& ctx, const SparseSymMatrix& a, const char* what) {
  detail::require_pattern(a.pattern(), ctx.sym(), what);
}

}  // namespace

SparseSymMatrix hess_apply(const HessianContext& ctx, const SparseSymMatrix& y) {
  check(ctx, y, "hess_apply");
  const auto& sym = ctx.sym();
  const auto& pat = sym.pattern();
  const auto& fv = ctx.chol().values;
  const auto& sv = ctx.s().values();
  std::vector<double> k(pat.nnz());
  linearized_factor(ctx, y, sym.postorder(), k);

  // Steps 2 and 3 share one reverse sweep; block 0 of each front carries S
  // (giving V_j = S_{I_j I_j}) and block 1 carries T (giving V'_j).
  SparseSymMatrix t(sym.pattern_ptr());
  Eigen::VectorXd mi, bl;
  detail::reverse_sweep(
      sym, 2, detail::lower_gather(sym, 2), [&](int j, double* w, double* front, int m) {
        const int b = pat.col_begin(j), q = m - 1;
        const double d = fv[b];
        ConstVecMap l(fv.data() + b + 1, q);
        MatMap v(w, q, q), bm(w + static_cast<std::size_t>(q) * q, q, q);
        mi.noalias() = v.selfadjointView<Eigen::Lower>() * ConstVecMap(k.data() + b + 1, q);
        mi /= d;
        bl.noalias() = bm.selfadjointView<Eigen::Lower>() * l;
        double* out = t.values().data() + b;
        out[0] = k[b] / (d * d) - 2.0 * l.dot(mi) + l.dot(bl);
        VecMap(out + 1, q) = mi - bl;
        if (!front) return;
        double* f1 = front + static_cast<std::size_t>(m) * m;
        std::copy(sv.data() + b, sv.data() + b + m, front);
        detail::copy_lower(v.data(), q, front + 1 + m, m, q);
        std::copy(out, out + m, f1);
        detail::copy_lower(bm.data(), q, f1 + 1 + m, m, q);
      });
  return t;
}

SparseSymMatrix hess_solve(const HessianContext& ctx, const SparseSymMatrix& t) {
  check(ctx, t, "hess_solve");
  const auto& sym = ctx.sym();
  const auto& pat = sym.pattern();
  const auto& fv = ctx.chol().values;
  ctx.warm();

  // Step 1: M from T in reverse topological order, then step 2 in place.
  std::vector<double> k(pat.nnz());
  Eigen::VectorXd bl;
  detail::reverse_sweep(sym, 1, detail::lower_gather(sym, 1),
                        [&](int j, double* w, double* front, int m) {
                          const int b = pat.col_begin(j), q = m - 1;
                          const double d = fv[b];
                          const double* tc = t.values().data() + b;
                          ConstVecMap l(fv.data() + b + 1, q), ti(tc + 1, q);
                          MatMap bm(w, q, q);
                          bl.noalias() = bm.selfadjointView<Eigen::Lower>() * l;
                          const double mjj = tc[0] + 2.0 * l.dot(ti) + l.dot(bl);
                          VecMap mi(k.data() + b + 1, q);
                          mi = ti + bl;
                          k[b] = d * d * mjj;
                          const auto r = ctx.r(j);
                          r.triangularView<Eigen::Upper>().solveInPlace(mi);
                          r.transpose().triangularView<Eigen::Lower>().solveInPlace(mi);
                          mi *= d;
                          if (!front) return;
                          std::copy(tc, tc + m, front);
                          detail::copy_lower(w, q, front + 1 + m, m, q);
                        });

  // Step 3: linearized product.
  SparseSymMatrix y(sym.pattern_ptr());
  detail::forward_sweep(sym, [&](int j, double* f, int m) {
    const int b = pat.col_begin(j), q = m - 1;
    ConstVecMap l(fv.data() + b + 1, q), kappa(k.data() + b + 1, q);
    const double kjj = k[b];
    double* out = y.values().data() + b;
    out[0] = kjj - f[0];
    VecMap(out + 1, q) = kjj * l + kappa - ConstVecMap(f + 1, q);
    if (q == 0) return;
    auto u = detail::trailing(f, m).selfadjointView<Eigen::Lower>();
    u.rankUpdate(l, -kjj);
    u.rankUpdate(kappa, l, -1.0);
  });
  return y;
}

namespace {

// Step 2 half-scaling W from K for column j.
void scale_forward(const HessianContext& ctx, int j, const std::vector<double>& k,
                   double* out) {
  const auto& pat = ctx.sym().pattern();
  const int b = pat.col_begin(j), q = pat.col_end(j) - b - 1;
  const double d = ctx.chol().values[b];
  out[0] = k[b] / d;
  VecMap(out + 1, q).noalias() =
      ctx.r(j).transpose().triangularView<Eigen::Lower>() * ConstVecMap(k.data() + b + 1, q) /
      std::sqrt(d);
}

}  // namespace

SparseSymMatrix hess_factor_apply(const HessianContext& ctx, const SparseSymMatrix& y) {
  check(ctx, y, "hess_factor_apply");
  const auto& sym = ctx.sym();
  ctx.warm();
  std::vector<double> k(sym.pattern().nnz());
  linearized_factor(ctx, y, sym.postorder(), k);
  SparseSymMatrix w(sym.pattern_ptr());
  for (int j = 0; j < sym.n(); ++j)
    scale_forward(ctx, j, k, w.values().data() + sym.pattern().col_begin(j));
  return w;
}

SparseSymMatrix hess_factor_adjoint(const HessianContext& ctx, const SparseSymMatrix& w) {
  check(ctx, w, "hess_factor_adjoint");
  const auto& sym = ctx.sym();
  const auto& pat = sym.pattern();
  ctx.warm();
  std::vector<double> m(pat.nnz());
  for (int j = 0; j < sym.n(); ++j) {
    const int b = pat.col_begin(j), q = pat.col_end(j) - b - 1;
    const double d = ctx.chol().values[b];
    m[b] = w.values()[b] / d;
    VecMap(m.data() + b + 1, q).noalias() =
        ctx.r(j).triangularView<Eigen::Upper>() * ConstVecMap(w.values().data() + b + 1, q) /
        std::sqrt(d);
  }
  return linearized_projinv(ctx, m);
}

std::vector<int> support_of(const SparseSymMatrix& a) {
  std::vector<int> cols;
  const auto& p = a.pattern();
  for (int j = 0; j < p.n(); ++j) {
    const auto c = a.column(j);
    if (std::any_of(c.begin(), c.end(), [](double e) { return e != 0.0; })) cols.push_back(j);
  }
  return cols;
}

SparseFactorResult hess_factor_apply_sparse(const HessianContext& ctx,
                                            const SparseSymMatrix& y,
                                            const std::vector<int>& support) {
  check(ctx, y, "hess_factor_apply_sparse");
  const auto& sym = ctx.sym();
  const auto& pat = sym.pattern();
  const int n = sym.n();
  ctx.warm();

  std::vector<char> mark(n, 0);
  for (int j : support) {
    if (j < 0 || j >= n) throw InvalidArgument("support column out of range");
    for (int a = j; a >= 0 && !mark[a]; a = sym.parent(a)) mark[a] = 1;
  }
  for (int j = 0; j < n; ++j) {
    if (mark[j]) continue;
    const auto c = y.column(j);
    if (std::any_of(c.begin(), c.end(), [](double e) { return e != 0.0; }))
      throw InvalidArgument("support does not cover column " + std::to_string(j + 1));
  }

  SparseFactorResult res{SparseSymMatrix(sym.pattern_ptr()), {}, 0};
  for (int j : sym.postorder())
    if (mark[j]) res.columns.push_back(j);
  res.nodes_visited = res.columns.size();
  if (res.columns.empty()) return res;

  std::vector<double> k(pat.nnz());
  linearized_factor(ctx, y, res.columns, k);
  for (int j : res.columns) scale_forward(ctx, j, k, res.value.values().data() + pat.col_begin(j));
  return res;
}

Eigen::MatrixXd gram_matrix(const HessianContext& ctx, const std::vector<SparseArgument>& a) {
  const int m = static_cast<int>(a.size());
  std::vector<SparseFactorResult> w;
  w.reserve(m);
  for (const auto& arg : a) {
    w.push_back(hess_factor_apply_sparse(ctx, arg.value, arg.support));
    std::sort(w.back().columns.begin(), w.back().columns.end());
  }
  const auto& pat = ctx.sym().pattern();
  Eigen::MatrixXd h(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c <= r; ++c) {
      // Sum over columns nonzero in both.
      double sum = 0.0;
      const auto& cr = w[r].columns;
      const auto& cc = w[c].columns;
      std::size_t p = 0, q = 0;
      while (p < cr.size() && q < cc.size()) {
        if (cr[p] < cc[q]) {
          ++p;
        } else if (cc[q] < cr[p]) {
          ++q;
        } else {
          const int j = cr[p];
          const double* x = w[r].value.values().data();
          const double* z = w[c].value.values().data();
          sum += x[pat.col_begin(j)] * z[pat.col_begin(j)];
          for (int s = pat.col_begin(j) + 1; s < pat.col_end(j); ++s) sum += 2.0 * x[s] * z[s];
          ++p;
          ++q;
        }
      }
      h(r, c) = h(c, r) = sum;
    }
  return h;
}

}  // namespace logdet

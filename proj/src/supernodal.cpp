#include "logdet/supernodal.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "frontal.hpp"
#include "logdet/dense.hpp"
#include "logdet/errors.hpp"

namespace logdet {

using detail::BlockMap;
using detail::ConstMatMap;
using detail::MatMap;

namespace {

constexpr double kPivotTolerance = 1e-14;
constexpr int kThinColumns = 8;

double max_diagonal(const SparseSymMatrix& a) {
  double m = 0.0;
  for (int j = 0; j < a.n(); ++j) m = std::max(m, a.diag(j));
  return m;
}

int new_size(const CliqueForest& cf, int c) {
  return static_cast<int>(cf.new_set(c).size());
}

// Column v at position a of clique c must be clique(c)[a..], which is what
// lets the sweeps move whole column segments between fronts and the pattern.
void check_forest(const SymbolicAnalysis& sym, const CliqueForest& cf) {
  if (cf.n() != sym.n())
    throw InvalidArgument("clique forest has the wrong number of vertices");
  const auto& pat = sym.pattern();
  for (int c = 0; c < cf.size(); ++c) {
    const auto nw = cf.new_set(c);
    for (std::size_t a = 0; a < nw.size(); ++a) {
      const int v = nw[a];
      if (pat.col_end(v) - pat.col_begin(v) != cf.order(c) - static_cast<int>(a) ||
          pat.rowind()[pat.col_end(v) - 1] != cf.clique(c).back())
        throw InvalidArgument("clique forest does not match the pattern");
    }
  }
}

BlockCholeskyFactor allocate(const SymbolicPtr& sym, const CliqueForestPtr& cf) {
  BlockCholeskyFactor f{sym, cf, {}, {}, {}, {}};
  std::size_t d = 0, l = 0;
  for (int c = 0; c < cf->size(); ++c) {
    const std::size_t nn = cf->new_set(c).size(), na = cf->anc(c).size();
    f.d_off.push_back(d);
    f.l_off.push_back(l);
    d += nn * nn;
    l += na * nn;
  }
  f.dfac.assign(d, 0.0);
  f.lblk.assign(l, 0.0);
  return f;
}

MatMap d_factor(BlockCholeskyFactor& f, int c) {
  const int k = new_size(*f.cf, c);
  return {f.dfac.data() + f.d_off[c], k, k};
}

MatMap l_block(BlockCholeskyFactor& f, int c) {
  return {f.lblk.data() + f.l_off[c], static_cast<Eigen::Index>(f.cf->anc(c).size()),
          new_size(*f.cf, c)};
}

// Largest number of doubles held at once by the block stack of a clique
// sweep, found by replaying its pushes and pops.
template <class Order>
std::size_t stack_peak(const CliqueForest& cf, bool reverse, Order&& block_order) {
  std::vector<std::size_t> sizes;
  std::size_t used = 0, peak = 0;
  auto push = [&](int c) {
    const auto k = static_cast<std::size_t>(block_order(c));
    sizes.push_back(k * k);
    used += k * k;
    peak = std::max(peak, used);
  };
  auto pop = [&] {
    used -= sizes.back();
    sizes.pop_back();
  };
  const auto& post = cf.postorder();
  if (reverse) {
    for (auto it = post.rbegin(); it != post.rend(); ++it) {
      const int c = *it, p = cf.parent(c);
      if (p >= 0 && cf.children(p).front() == c) pop();
      if (!cf.children(c).empty()) push(c);
    }
  } else {
    std::vector<char> has_acc(cf.size(), 0);
    for (int c : post) {
      if (has_acc[c]) pop();
      const int p = cf.parent(c);
      if (p >= 0 && !has_acc[p]) {
        push(p);
        has_acc[p] = 1;
      }
    }
  }
  return peak;
}

// Children-first sweep over the clique tree. body(c, F, m) sees the front
// of clique c holding the children's updates; afterwards the anc x anc block
// of F is extend-added into the parent's front.
template <class Body>
void clique_forward(const CliqueForest& cf, Body&& body) {
  const std::size_t mx = cf.max_order();
  std::vector<double> work(mx * mx);
  std::vector<char> has_acc(cf.size(), 0);
  detail::FrontStack stack(stack_peak(cf, false, [&](int c) { return cf.order(c); }));
  for (int c : cf.postorder()) {
    const int m = cf.order(c);
    double* f = work.data();
    if (has_acc[c]) {
      detail::copy_lower(stack.top(), m, f, m, m);
      stack.pop();
    } else {
      detail::zero_lower(f, m, m);
    }
    body(c, f, m);
    const int p = cf.parent(c);
    if (p < 0) continue;
    const int mp = cf.order(p), nn = new_size(cf, c);
    if (!has_acc[p]) {
      stack.push_zero(mp);
      has_acc[p] = 1;
    }
    detail::scatter_add_lower(stack.top(), mp, f + nn + static_cast<std::size_t>(nn) * m,
                              m, cf.anc_map(c));
  }
}

// Parent-first sweep. gather(c, P, k) reads the parent's stored block P of
// order k; body(c, B) computes clique c and fills B, a block of order
// block_order(c), when c has children.
template <class Order, class Gather, class Body>
void clique_reverse(const CliqueForest& cf, Order&& block_order, Gather&& gather,
                    Body&& body) {
  detail::FrontStack stack(stack_peak(cf, true, block_order));
  const auto& post = cf.postorder();
  for (auto it = post.rbegin(); it != post.rend(); ++it) {
    const int c = *it, p = cf.parent(c);
    if (p >= 0) {
      gather(c, static_cast<const double*>(stack.top()), stack.top_order());
      if (cf.children(p).front() == c) stack.pop();
    }
    body(c, cf.children(c).empty() ? nullptr : stack.push(block_order(c)));
  }
}

// Lower triangle of the first nn columns of the clique matrix of s.
void load_columns(const SparseSymMatrix& s, const CliqueForest& cf, int c, double* w,
                  int m) {
  const auto nw = cf.new_set(c);
  for (std::size_t a = 0; a < nw.size(); ++a) {
    const auto col = s.column(nw[a]);
    std::copy(col.begin(), col.end(), w + a * m + a);
  }
}

void store_columns(const double* w, int m, const CliqueForest& cf, int c,
                   SparseSymMatrix& out) {
  const auto nw = cf.new_set(c);
  const auto& pat = out.pattern();
  for (std::size_t a = 0; a < nw.size(); ++a)
    std::copy(w + a * m + a, w + a * m + m, out.values().data() + pat.col_begin(nw[a]));
}

// Sets D_c from its inverse: with At = Rt Rt^T (Rt upper), D = C C^T for
// the lower triangular C = Rt^{-T}.
void set_d_from_inverse(BlockCholeskyFactor& f, int c, const Eigen::MatrixXd& at,
                        double tol) {
  const int nn = static_cast<int>(at.rows());
  Eigen::MatrixXd rt(nn, nn);
  if (!dense::upper_factor(at, rt) || !(rt.diagonal().array().square() > tol).all())
    throw NoPositiveCompletion(f.cf->rep(c));
  auto cm = d_factor(f, c);
  cm.setIdentity();
  rt.transpose().triangularView<Eigen::Lower>().solveInPlace(cm);
}

}  // namespace

BlockCholeskyFactor sn_factor(const SparseSymMatrix& x, const SymbolicPtr& sym,
                              const CliqueForestPtr& cf, SweepCounters* counters) {
  detail::require_pattern(x.pattern(), *sym, "sn_factor");
  check_forest(*sym, *cf);
  auto f = allocate(sym, cf);
  const double tol = kPivotTolerance * max_diagonal(x);
  clique_forward(*cf, [&](int c, double* fr, int m) {
    const auto nw = cf->new_set(c);
    const int nn = static_cast<int>(nw.size()), na = m - nn;
    for (int a = 0; a < nn; ++a) {
      const auto col = x.column(nw[a]);
      double* fc = fr + static_cast<std::size_t>(a) * m + a;
      for (std::size_t t = 0; t < col.size(); ++t) fc[t] += col[t];
    }
    MatMap front(fr, m, m);
    Eigen::LLT<Eigen::MatrixXd> llt(front.topLeftCorner(nn, nn));
    auto cm = d_factor(f, c);
    if (llt.info() == Eigen::Success) cm = llt.matrixL();
    if (llt.info() != Eigen::Success || !(cm.diagonal().array().square() > tol).all())
      throw NotPositiveDefinite(cf->rep(c));
    if (na > 0) {
      // G = F21 C^{-T}, U = F22 - G G^T, L = G C^{-1}.
      auto g = front.bottomLeftCorner(na, nn);
      cm.transpose().triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(g);
      BlockMap u(fr + nn + static_cast<std::size_t>(nn) * m, na, na, Eigen::OuterStride<>(m));
      u.selfadjointView<Eigen::Lower>().rankUpdate(g, -1.0);
      auto l = l_block(f, c);
      l = g;
      cm.triangularView<Eigen::Lower>().solveInPlace<Eigen::OnTheRight>(l);
    }
    if (counters) ++counters->frontal_assemblies;
  });
  return f;
}

SparseSymMatrix sn_projected_inverse(const BlockCholeskyFactor& f) {
  const auto& cf = *f.cf;
  SparseSymMatrix s(f.sym->pattern_ptr());
  const std::size_t mx = cf.max_order();
  std::vector<double> work(mx * mx);
  Eigen::MatrixXd ci(mx, mx);
  auto gather = [&](int c, const double* pf, int mp) {
    const int m = cf.order(c), nn = new_size(cf, c);
    detail::gather_lower(pf, mp, work.data() + nn + static_cast<std::size_t>(nn) * m, m,
                         cf.anc_map(c));
  };
  auto body = [&](int c, double* front) {
    const int m = cf.order(c), nn = new_size(cf, c), na = m - nn;
    MatMap w(work.data(), m, m);
    const auto l = f.l_block(c);
    const auto cm = f.d_factor(c);
    // D^{-1} = C^{-T} C^{-1}.
    auto cinv = ci.topLeftCorner(nn, nn);
    cinv.setIdentity();
    cm.triangularView<Eigen::Lower>().solveInPlace(cinv);
    w.topLeftCorner(nn, nn).noalias() = cinv.transpose() * cinv;
    if (na > 0) {
      BlockMap v(work.data() + nn + static_cast<std::size_t>(nn) * m, na, na,
                 Eigen::OuterStride<>(m));
      auto san = w.bottomLeftCorner(na, nn);
      if (nn <= kThinColumns)
        for (int k = 0; k < nn; ++k)
          san.col(k).noalias() = -(v.selfadjointView<Eigen::Lower>() * l.col(k));
      else
        san.noalias() = -(v.selfadjointView<Eigen::Lower>() * l);
      w.topLeftCorner(nn, nn).noalias() -= san.transpose() * l;
    }
    store_columns(work.data(), m, cf, c, s);
    if (front) detail::copy_lower(work.data(), m, front, m, m);
  };
  clique_reverse(cf, [&](int c) { return cf.order(c); }, gather, body);
  return s;
}

namespace {

BlockCholeskyFactor completion_plain(const SparseSymMatrix& s, const SymbolicPtr& sym,
                                     const CliqueForestPtr& cf, double tol,
                                     SweepCounters* counters) {
  auto f = allocate(sym, cf);
  const std::size_t mx = cf->max_order();
  std::vector<double> work(mx * mx);
  auto gather = [&](int c, const double* pf, int mp) {
    const int m = cf->order(c), nn = new_size(*cf, c);
    detail::gather_lower(pf, mp, work.data() + nn + static_cast<std::size_t>(nn) * m, m,
                         cf->anc_map(c));
  };
  auto body = [&](int c, double* front) {
    const int m = cf->order(c), nn = new_size(*cf, c), na = m - nn;
    load_columns(s, *cf, c, work.data(), m);
    MatMap w(work.data(), m, m);
    Eigen::MatrixXd at = w.topLeftCorner(nn, nn).selfadjointView<Eigen::Lower>();
    if (na > 0) {
      // L = -V^{-1} B, D^{-1} = S_nn + B^T L.
      const auto b = w.bottomLeftCorner(na, nn);
      Eigen::LLT<Eigen::MatrixXd> vl(w.bottomRightCorner(na, na));
      if (vl.info() != Eigen::Success) throw NoPositiveCompletion(cf->rep(c));
      auto l = l_block(f, c);
      l = -vl.solve(b);
      at.noalias() += b.transpose() * l;
    }
    set_d_from_inverse(f, c, at, tol);
    if (front) detail::copy_lower(work.data(), m, front, m, m);
    if (counters) ++counters->frontal_assemblies;
  };
  clique_reverse(*cf, [&](int c) { return cf->order(c); }, gather, body);
  return f;
}

BlockCholeskyFactor completion_factored(const SparseSymMatrix& s, const SymbolicPtr& sym,
                                        const CliqueForestPtr& cf, double tol,
                                        SweepCounters* counters) {
  auto f = allocate(sym, cf);
  const std::size_t mx = cf->max_order();
  // R_c with R_c R_c^T = S_{anc(c) anc(c)}, formed by gather.
  std::vector<double> rwork(mx * mx);
  std::vector<int> kept;
  std::size_t reflections = 0;

  // V_c = [A B^T; B C C^T] where A, B come from the parent's new columns
  // and C from rows of the parent's factor.
  auto gather = [&](int c, const double* pf, int kp) {
    const int p = cf->parent(c), nnp = new_size(*cf, p);
    const auto pos = cf->anc_map(c);
    const int na = static_cast<int>(pos.size());
    const int k1 = static_cast<int>(std::lower_bound(pos.begin(), pos.end(), nnp) - pos.begin());
    const int q = na - k1;
    kept.resize(q);
    for (int t = 0; t < q; ++t) kept[t] = pos[k1 + t] - nnp;
    MatMap rc(rwork.data(), na, na);
    rc.setZero();
    auto rq = rc.bottomRightCorner(q, q);
    reflections += dense::retriangularize_rows(ConstMatMap(pf, kp, kp), kept, rq);
    if (k1 == 0) return;
    const auto pc = cf->clique(p);
    Eigen::MatrixXd a(k1, k1), h(q, k1);
    for (int t = 0; t < k1; ++t) {
      const auto col = s.column(pc[pos[t]]);
      for (int r = t; r < na; ++r) {
        const double e = col[pos[r] - pos[t]];
        if (r < k1)
          a(r, t) = e;
        else
          h(r - k1, t) = e;
      }
    }
    rq.triangularView<Eigen::Upper>().solveInPlace(h);
    a.noalias() -= h.transpose() * h;
    auto rt = rc.topLeftCorner(k1, k1);
    if (!dense::upper_factor(a, rt))
      throw NumericalBreakdown(cf->rep(c), "propagated factor is not positive definite");
    rc.topRightCorner(k1, q) = h.transpose();
  };

  Eigen::MatrixXd g;
  auto body = [&](int c, double* front) {
    const int m = cf->order(c), nn = new_size(*cf, c), na = m - nn;
    const auto nw = cf->new_set(c);
    Eigen::MatrixXd at(nn, nn);
    g.resize(na, nn);
    for (int a = 0; a < nn; ++a) {
      const auto col = s.column(nw[a]);
      for (int t = a; t < nn; ++t) at(t, a) = at(a, t) = col[t - a];
      for (int r = 0; r < na; ++r) g(r, a) = col[nn - a + r];
    }
    if (na > 0) {
      // G = R^{-1} B, D^{-1} = S_nn - G^T G, L = -R^{-T} G.
      MatMap rc(rwork.data(), na, na);
      rc.triangularView<Eigen::Upper>().solveInPlace(g);
      at.noalias() -= g.transpose() * g;
      auto l = l_block(f, c);
      l = -g;
      rc.transpose().triangularView<Eigen::Lower>().solveInPlace(l);
      if (front) std::copy(rwork.data(), rwork.data() + static_cast<std::size_t>(na) * na, front);
    }
    set_d_from_inverse(f, c, at, tol);
    if (counters) ++counters->frontal_assemblies;
  };
  clique_reverse(*cf, [&](int c) { return static_cast<int>(cf->anc(c).size()); }, gather,
                 body);
  if (counters) counters->reflections += reflections;
  return f;
}

}  // namespace

BlockCholeskyFactor sn_completion(const SparseSymMatrix& s, const SymbolicPtr& sym,
                                  const CliqueForestPtr& cf, bool factored,
                                  SweepCounters* counters) {
  detail::require_pattern(s.pattern(), *sym, "sn_completion");
  check_forest(*sym, *cf);
  const double tol = kPivotTolerance * max_diagonal(s);
  return factored ? completion_factored(s, sym, cf, tol, counters)
                  : completion_plain(s, sym, cf, tol, counters);
}

CholeskyFactor to_scalar(const BlockCholeskyFactor& f) {
  const auto& cf = *f.cf;
  const auto& pat = f.sym->pattern();
  CholeskyFactor out{f.sym, std::vector<double>(pat.nnz())};
  for (int c = 0; c < cf.size(); ++c) {
    const auto nw = cf.new_set(c);
    const int nn = static_cast<int>(nw.size());
    const auto cm = f.d_factor(c);
    const Eigen::VectorXd dg = cm.diagonal();
    // D_c = Lt diag(dg^2) Lt^T with unit lower Lt.
    const Eigen::MatrixXd lt = cm * dg.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd ll = f.l_block(c) * lt;
    for (int a = 0; a < nn; ++a) {
      double* o = out.values.data() + pat.col_begin(nw[a]);
      o[0] = dg[a] * dg[a];
      for (int t = a + 1; t < nn; ++t) o[t - a] = lt(t, a);
      for (Eigen::Index r = 0; r < ll.rows(); ++r) o[nn - a + r] = ll(r, a);
    }
  }
  return out;
}

}  // namespace logdet

#include "logdet/multifrontal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "frontal.hpp"
#include "logdet/dense.hpp"
#include "logdet/errors.hpp"

namespace logdet {

namespace detail {

void require_pattern(const SparsityPattern& a, const SymbolicAnalysis& sym,
                     const char* what) {
  if (&a == &sym.pattern() || a == sym.pattern()) return;
  throw InvalidArgument(std::string(what) +
                        ": matrix pattern differs from the analysed pattern");
}

void factor_sweep(const SymbolicAnalysis& sym, const std::vector<double>& s,
                  double threshold, std::size_t* reflections,
                  const std::function<void(int, ConstMatMap, ConstVecMap, double)>& visit,
                  const std::function<void(int)>& fail) {
  const auto& pat = sym.pattern();
  Eigen::VectorXd g;
  auto gather = [&](int j, const double* pf, int mp, double* w) {
    const int q = sym.degree(j);
    ConstMatMap parent(pf, mp, mp);
    MatMap out(w, q, q);
    const int r = dense::retriangularize_rows(parent, sym.relmap(j), out);
    if (reflections) *reflections += r;
  };
  auto body = [&](int j, double* w, double* front, int m) {
    const int q = m - 1;
    const double* col = s.data() + pat.col_begin(j);
    MatMap r(w, q, q);
    g = ConstVecMap(col + 1, q);
    r.triangularView<Eigen::Upper>().solveInPlace(g);
    const double alpha2 = col[0] - g.squaredNorm();
    if (!(alpha2 > threshold)) fail(j);
    visit(j, ConstMatMap(w, q, q), ConstVecMap(g.data(), q), alpha2);
    if (!front) return;
    MatMap f(front, m, m);
    f.setZero();
    f(0, 0) = std::sqrt(alpha2);
    f.row(0).tail(q) = g.transpose();
    f.bottomRightCorner(q, q) = r;
  };
  reverse_sweep(sym, 1, gather, body);
}

}  // namespace detail

namespace {

double max_diagonal(const SparseSymMatrix& a) {
  double m = 0.0;
  for (int j = 0; j < a.n(); ++j) m = std::max(m, a.diag(j));
  return m;
}

constexpr double kPivotTolerance = 1e-14;

}  // namespace

CholeskyFactor factor(const SparseSymMatrix& x, const SymbolicPtr& sym,
                      SweepCounters* counters) {
  detail::require_pattern(x.pattern(), *sym, "factor");
  const auto& pat = sym->pattern();
  CholeskyFactor f{sym, std::vector<double>(pat.nnz())};
  const double tol = kPivotTolerance * max_diagonal(x);
  detail::forward_sweep(*sym, [&](int j, double* front, int m) {
    const auto xc = x.column(j);
    for (int a = 0; a < m; ++a) front[a] += xc[a];
    const double d = front[0];
    if (!(d > tol)) throw NotPositiveDefinite(j);
    double* out = f.values.data() + pat.col_begin(j);
    out[0] = d;
    for (int a = 1; a < m; ++a) out[a] = front[a] / d;
    if (m > 1)
      detail::trailing(front, m).selfadjointView<Eigen::Lower>().rankUpdate(
          detail::ConstVecMap(out + 1, m - 1), -d);
    if (counters) ++counters->frontal_assemblies;
  });
  return f;
}

SparseSymMatrix product(const CholeskyFactor& f) {
  const auto& sym = *f.sym;
  const auto& pat = sym.pattern();
  SparseSymMatrix x(sym.pattern_ptr());
  detail::forward_sweep(sym, [&](int j, double* front, int m) {
    const double* lc = f.values.data() + pat.col_begin(j);
    const double d = lc[0];
    double* out = x.values().data() + pat.col_begin(j);
    out[0] = d - front[0];
    for (int a = 1; a < m; ++a) out[a] = d * lc[a] - front[a];
    if (m > 1)
      detail::trailing(front, m).selfadjointView<Eigen::Lower>().rankUpdate(
          detail::ConstVecMap(lc + 1, m - 1), -d);
  });
  return x;
}

SparseSymMatrix projected_inverse(const CholeskyFactor& f) {
  const auto& sym = *f.sym;
  const auto& pat = sym.pattern();
  SparseSymMatrix s(sym.pattern_ptr());
  Eigen::VectorXd si;
  detail::reverse_sweep(
      sym, 1, detail::lower_gather(sym, 1),
      [&](int j, double* w, double* front, int m) {
        const int q = m - 1;
        const double* lc = f.values.data() + pat.col_begin(j);
        detail::ConstVecMap l(lc + 1, q);
        detail::MatMap v(w, q, q);
        si.noalias() = -(v.selfadjointView<Eigen::Lower>() * l);
        const double sjj = 1.0 / lc[0] - si.dot(l);
        double* out = s.values().data() + pat.col_begin(j);
        out[0] = sjj;
        std::copy(si.data(), si.data() + q, out + 1);
        if (!front) return;
        std::copy(out, out + m, front);
        detail::copy_lower(w, q, front + 1 + m, m, q);
      });
  return s;
}

CholeskyFactor completion(const SparseSymMatrix& s, const SymbolicPtr& sym,
                          SweepCounters* counters) {
  detail::require_pattern(s.pattern(), *sym, "completion");
  const auto& pat = sym->pattern();
  CholeskyFactor f{sym, std::vector<double>(pat.nnz())};
  const double tol = kPivotTolerance * max_diagonal(s);
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd l;
  detail::reverse_sweep(
      *sym, 1, detail::lower_gather(*sym, 1),
      [&](int j, double* w, double* front, int m) {
        const int q = m - 1;
        const auto sc = s.column(j);
        detail::ConstVecMap b(sc.data() + 1, q);
        double denom = sc[0];
        if (q > 0) {
          llt.compute(detail::MatMap(w, q, q));
          if (llt.info() != Eigen::Success) throw NoPositiveCompletion(j);
          l = -llt.solve(b);
          denom += b.dot(l);
        }
        if (!(denom > tol)) throw NoPositiveCompletion(j);
        double* out = f.values.data() + pat.col_begin(j);
        out[0] = 1.0 / denom;
        std::copy(l.data(), l.data() + q, out + 1);
        if (counters) ++counters->frontal_assemblies;
        if (!front) return;
        std::copy(sc.begin(), sc.end(), front);
        detail::copy_lower(w, q, front + 1 + m, m, q);
      });
  return f;
}

CholeskyFactor completion_factored(const SparseSymMatrix& s,
                                   const SymbolicPtr& sym,
                                   SweepCounters* counters) {
  detail::require_pattern(s.pattern(), *sym, "completion_factored");
  const auto& pat = sym->pattern();
  CholeskyFactor f{sym, std::vector<double>(pat.nnz())};
  std::size_t reflections = 0;
  Eigen::VectorXd l;
  detail::factor_sweep(
      *sym, s.values(), kPivotTolerance * max_diagonal(s), &reflections,
      [&](int j, detail::ConstMatMap r, detail::ConstVecMap g, double alpha2) {
        // V^{-1} b = R^{-T} g.
        l = -g;
        r.transpose().triangularView<Eigen::Lower>().solveInPlace(l);
        double* out = f.values.data() + pat.col_begin(j);
        out[0] = 1.0 / alpha2;
        std::copy(l.data(), l.data() + l.size(), out + 1);
        if (counters) ++counters->frontal_assemblies;
      },
      [](int j) { throw NoPositiveCompletion(j); });
  if (counters) counters->reflections += reflections;
  return f;
}

double logdet(const CholeskyFactor& f) {
  double sum = 0.0;
  for (int j = 0; j < f.sym->n(); ++j) sum += std::log(f.d(j));
  return sum;
}

double barrier_value(const SparseSymMatrix& x, const SymbolicPtr& sym) {
  return -logdet(factor(x, sym));
}

double dual_barrier_value(const SparseSymMatrix& s, const SymbolicPtr& sym) {
  return logdet(completion_factored(s, sym)) - sym->n();
}

}  // namespace logdet

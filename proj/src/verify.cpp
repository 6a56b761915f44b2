#include "logdet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numeric>

#include "logdet/chordal.hpp"
#include "logdet/errors.hpp"
#include "logdet/hessian.hpp"
#include "logdet/multifrontal.hpp"
#include "logdet/oracle.hpp"
#include "logdet/supernodal.hpp"

namespace logdet {

namespace {

struct Property {
  const char* suite;
  const char* name;
  double tolerance;
};

const Property kProperties[] = {
    {"symbolic", "fill_matches_dense_elimination", 0},
    {"symbolic", "etree_parent_is_first_subdiagonal", 0},
    {"symbolic", "relmap_positions", 0},
    {"chordal", "clique_tree_valid", 0},
    {"chordal", "representatives_brute_force", 0},
    {"multifrontal", "factor_product_roundtrip", 1e-12},
    {"multifrontal", "factor_vs_dense_ldl", 1e-10},
    {"multifrontal", "projected_inverse_dense", 1e-10},
    {"multifrontal", "completion_roundtrip", 1e-9},
    {"multifrontal", "completion_factored_agreement", 1e-11},
    {"multifrontal", "barrier_value_dense", 1e-10},
    {"hessian", "hess_apply_dense", 1e-9},
    {"hessian", "hess_apply_finite_difference", 1e-5},
    {"hessian", "hess_solve_roundtrip", 1e-8},
    {"hessian", "hess_factor_composition", 1e-9},
    {"hessian", "hess_factor_adjoint_pairing", 1e-10},
    {"hessian", "hess_apply_self_adjoint", 1e-10},
    {"hessian", "sparse_argument_agreement", 1e-12},
    {"hessian", "dual_hessian_inverse_relation", 1e-4},
    {"supernodal", "sn_factor_agreement", 1e-11},
    {"supernodal", "sn_projected_inverse_agreement", 1e-11},
    {"supernodal", "sn_completion_agreement", 1e-11},
    {"supernodal", "sn_singleton_agreement", 1e-14},
    {"oracle", "hessian_matrix_symmetry", 1e-12},
    {"oracle", "finite_difference_gradient", 1e-6},
};

std::string key(const Property& p) { return std::string(p.suite) + "." + p.name; }

class Recorder {
 public:
  Recorder(const VerifyOptions& opt) : inject_(opt.inject) {}

  bool wants(const char* name) const { return active_.count(name) > 0; }
  void enable(const Property& p) {
    active_[p.name] = results_.size();
    results_.push_back({p.suite, p.name, p.tolerance, 0.0, 0, true});
  }

  void observe(const char* name, double err) {
    auto& r = results_[active_.at(name)];
    if (std::isnan(err)) err = INFINITY;
    r.worst = std::max(r.worst, err);
    ++r.cases;
    r.passed = r.worst <= r.tolerance;
  }

  // The computed side of a comparison, perturbed when targeted.
  bool injected(const char* name) const {
    return !inject_.empty() && (inject_ == name || inject_ == results_[active_.at(name)].suite +
                                                                  std::string(".") + name);
  }
  SparseSymMatrix got(const char* name, SparseSymMatrix a) const {
    if (injected(name)) a.values()[0] += 1e-3 * std::max(1.0, std::abs(a.values()[0]));
    return a;
  }
  std::vector<double> got(const char* name, std::vector<double> a) const {
    if (injected(name)) a[0] += 1e-3 * std::max(1.0, std::abs(a[0]));
    return a;
  }
  Eigen::MatrixXd got(const char* name, Eigen::MatrixXd a) const {
    if (injected(name) && a.rows() > 1) a(1, 0) += 1e-3 * std::max(1.0, std::abs(a(1, 0)));
    return a;
  }
  double got(const char* name, double a) const {
    return injected(name) ? a + 1e-3 * std::max(1.0, std::abs(a)) : a;
  }

  std::vector<PropertyResult> take() { return std::move(results_); }

 private:
  std::string inject_;
  std::map<std::string, std::size_t> active_;
  std::vector<PropertyResult> results_;
};

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0, s = 1.0;
  for (std::size_t q = 0; q < a.size(); ++q) {
    d = std::max(d, std::abs(a[q] - b[q]));
    s = std::max(s, std::abs(b[q]));
  }
  return d / s;
}

PatternPtr shared(SparsityPattern p) { return std::make_shared<const SparsityPattern>(std::move(p)); }

// Random filled pattern of order n mixing sparse and dense shapes.
SparsityPattern random_pattern(int n, std::uint64_t seed) {
  oracle::Rng rng(seed * 7919 + 1);
  const double density = rng.uniform(0.5, 4.0) / n;
  return oracle::gen_chordal(n, std::min(1.0, density), seed);
}

SparsityPattern random_raw(int n, std::uint64_t seed) {
  oracle::Rng rng(seed);
  std::vector<std::vector<int>> rows(n);
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i)
      if (rng.uniform() < 2.0 / n) rows[j].push_back(i);
  return SparsityPattern::from_columns(n, rows);
}

Eigen::MatrixXd dense_ldlt(const CholeskyFactor& f) {
  const auto& v = f.sym->pattern();
  const int n = v.n();
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd d(n);
  for (int j = 0; j < n; ++j) {
    d[j] = f.d(j);
    const auto rows = v.below(j);
    const auto lj = f.l(j);
    for (std::size_t a = 0; a < rows.size(); ++a) l(rows[a], j) = lj[a];
  }
  return l * d.asDiagonal() * l.transpose();
}

void symbolic_suite(Recorder& rec, int n, std::uint64_t seed) {
  const auto raw = random_raw(n, seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  oracle::Rng rng(seed + 5);
  for (int k = n - 1; k > 0; --k) std::swap(order[k], order[rng.below(k + 1)]);
  const auto sym = fill_pattern(raw, order);
  const auto& v = sym->pattern();
  if (rec.wants("fill_matches_dense_elimination")) {
    const auto want = oracle::dense_fill(raw, order);
    double bad = (v == want) ? 0 : 1;
    bad += static_cast<double>(oracle::fill_violations(v).size());
    rec.observe("fill_matches_dense_elimination", rec.got("fill_matches_dense_elimination", bad));
  }
  if (rec.wants("etree_parent_is_first_subdiagonal")) {
    double bad = 0;
    for (int j = 0; j < n; ++j) {
      const auto b = v.below(j);
      bad += sym->parent(j) != (b.empty() ? -1 : b.front());
    }
    rec.observe("etree_parent_is_first_subdiagonal",
                rec.got("etree_parent_is_first_subdiagonal", bad));
  }
  if (rec.wants("relmap_positions")) {
    double bad = 0;
    for (int j = 0; j < n; ++j) {
      if (sym->parent(j) < 0) continue;
      const auto pc = v.column(sym->parent(j));
      const auto b = v.below(j);
      const auto map = sym->relmap(j);
      for (std::size_t a = 0; a < b.size(); ++a) bad += pc[map[a]] != b[a];
    }
    rec.observe("relmap_positions", rec.got("relmap_positions", bad));
  }
}

void chordal_suite(Recorder& rec, const SymbolicPtr& sym) {
  const auto& v = sym->pattern();
  if (rec.wants("clique_tree_valid")) {
    double bad = 0;
    for (PickRule r : {PickRule::MaxDegree, PickRule::FirstEligible})
      bad += verify_clique_tree(clique_tree(*sym, r), *sym).has_value();
    bad += verify_clique_tree(singleton_forest(*sym), *sym).has_value();
    rec.observe("clique_tree_valid", rec.got("clique_tree_valid", bad));
  }
  if (rec.wants("representatives_brute_force")) {
    // j represents a clique iff I'_j is contained in no other I'_k.
    std::vector<int> want;
    for (int j = 0; j < v.n(); ++j) {
      const auto cj = v.column(j);
      bool maximal = true;
      for (int k = 0; k < j && maximal; ++k) {
        const auto ck = v.column(k);
        maximal = !std::includes(ck.begin(), ck.end(), cj.begin(), cj.end());
      }
      if (maximal) want.push_back(j);
    }
    const double bad = representative_vertices(*sym) == want ? 0 : 1;
    rec.observe("representatives_brute_force", rec.got("representatives_brute_force", bad));
  }
}

void multifrontal_suite(Recorder& rec, const SymbolicPtr& sym, std::uint64_t seed) {
  const auto& v = sym->pattern_ptr();
  const auto x = oracle::gen_spd(v, seed);
  const auto f = factor(x, sym);
  const auto xd = oracle::to_dense(x);
  if (rec.wants("factor_product_roundtrip"))
    rec.observe("factor_product_roundtrip",
                relative_difference(rec.got("factor_product_roundtrip", product(f)), x));
  if (rec.wants("factor_vs_dense_ldl")) {
    const auto ldl = oracle::dense_ldl(xd);
    std::vector<double> want(v->nnz());
    for (int j = 0; j < v->n(); ++j) {
      want[v->col_begin(j)] = ldl.d[j];
      for (int q = v->col_begin(j) + 1; q < v->col_end(j); ++q) want[q] = ldl.l(v->rowind()[q], j);
    }
    rec.observe("factor_vs_dense_ldl", max_rel(rec.got("factor_vs_dense_ldl", f.values), want));
  }
  if (rec.wants("projected_inverse_dense")) {
    const auto want = oracle::dense_project(oracle::dense_inverse(xd), v);
    rec.observe("projected_inverse_dense",
                relative_difference(rec.got("projected_inverse_dense", projected_inverse(f)), want));
  }
  if (rec.wants("barrier_value_dense")) {
    const double want = -oracle::dense_logdet(xd);
    const double got = rec.got("barrier_value_dense", barrier_value(x, sym));
    rec.observe("barrier_value_dense", std::abs(got - want) / std::max(1.0, std::abs(want)));
  }
  const auto s = oracle::gen_completable(v, seed + 1);
  if (rec.wants("completion_roundtrip")) {
    const auto xhat = dense_ldlt(completion(s, sym));
    const auto back = oracle::dense_project(oracle::dense_inverse(xhat), v);
    rec.observe("completion_roundtrip",
                relative_difference(rec.got("completion_roundtrip", back), s));
  }
  if (rec.wants("completion_factored_agreement"))
    rec.observe("completion_factored_agreement",
                max_rel(rec.got("completion_factored_agreement", completion_factored(s, sym).values),
                        completion(s, sym).values));
}

void hessian_suite(Recorder& rec, const SymbolicPtr& sym, std::uint64_t seed) {
  const auto& v = sym->pattern_ptr();
  const auto x = oracle::gen_spd(v, seed);
  const HessianContext ctx(x, sym);
  const auto y = oracle::gen_direction(v, seed + 2);
  const auto z = oracle::gen_direction(v, seed + 3);
  const auto xi = oracle::dense_inverse(oracle::to_dense(x));
  const auto hy = hess_apply(ctx, y);
  if (rec.wants("hess_apply_dense")) {
    const auto want = oracle::dense_project(xi * oracle::to_dense(y) * xi, v);
    rec.observe("hess_apply_dense", relative_difference(rec.got("hess_apply_dense", hy), want));
  }
  if (rec.wants("hess_apply_finite_difference"))
    rec.observe("hess_apply_finite_difference",
                relative_difference(rec.got("hess_apply_finite_difference", hy),
                                    oracle::finite_diff_hessian(x, y)));
  if (rec.wants("hess_solve_roundtrip")) {
    rec.observe("hess_solve_roundtrip",
                relative_difference(rec.got("hess_solve_roundtrip", hess_solve(ctx, hy)), y));
    rec.observe("hess_solve_roundtrip",
                relative_difference(rec.got("hess_solve_roundtrip", hess_apply(ctx, hess_solve(ctx, y))), y));
  }
  const auto ry = hess_factor_apply(ctx, y);
  if (rec.wants("hess_factor_composition"))
    rec.observe("hess_factor_composition",
                relative_difference(rec.got("hess_factor_composition", hess_factor_adjoint(ctx, ry)), hy));
  if (rec.wants("hess_factor_adjoint_pairing")) {
    const double a = inner(ry, z);
    const double b = rec.got("hess_factor_adjoint_pairing", inner(y, hess_factor_adjoint(ctx, z)));
    rec.observe("hess_factor_adjoint_pairing", std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  if (rec.wants("hess_apply_self_adjoint")) {
    const double a = inner(hy, z);
    const double b = rec.got("hess_apply_self_adjoint", inner(y, hess_apply(ctx, z)));
    rec.observe("hess_apply_self_adjoint", std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  if (rec.wants("sparse_argument_agreement")) {
    oracle::Rng rng(seed + 4);
    SparseSymMatrix sp(v);
    for (int t = 0; t < 2; ++t)
      sp.values()[rng.below(static_cast<int>(v->nnz()))] = rng.uniform(0.5, 1.5);
    const auto pruned = hess_factor_apply_sparse(ctx, sp, support_of(sp));
    const auto full = hess_factor_apply(ctx, sp);
    const auto got = rec.got("sparse_argument_agreement", pruned.value.values());
    double d = 0.0;
    for (std::size_t q = 0; q < got.size(); ++q) d = std::max(d, std::abs(got[q] - full.values()[q]));
    rec.observe("sparse_argument_agreement", d);
  }
}

// At the completion Xhat of S, d Xhat / dS = -H(Xhat)^{-1}.
void dual_hessian_case(Recorder& rec, int n, std::uint64_t seed) {
  const auto sym = etree_only(random_pattern(n, seed));
  const auto& v = sym->pattern_ptr();
  const auto s = oracle::gen_completable(v, seed);
  const auto xhat = product(completion(s, sym));
  const HessianContext ctx(xhat, sym);
  const auto ds = oracle::gen_direction(v, seed + 3);
  const double t = 1e-5;
  const auto xp = product(completion(axpy(s, t, ds), sym));
  const auto xm = product(completion(axpy(s, -t, ds), sym));
  auto fd = axpy(xp, -1.0, xm);
  for (double& e : fd.values()) e /= -2 * t;
  rec.observe("dual_hessian_inverse_relation",
              relative_difference(rec.got("dual_hessian_inverse_relation", hess_solve(ctx, ds)), fd));
}

void supernodal_suite(Recorder& rec, const SymbolicPtr& sym, std::uint64_t seed) {
  const auto& v = sym->pattern_ptr();
  const auto x = oracle::gen_spd(v, seed);
  const auto s = oracle::gen_completable(v, seed + 1);
  const auto f = factor(x, sym);
  const auto c = completion(s, sym);
  const auto pinv = projected_inverse(f);
  for (PickRule r : {PickRule::MaxDegree, PickRule::FirstEligible}) {
    const auto cf = std::make_shared<const CliqueForest>(clique_tree(*sym, r));
    const auto bf = sn_factor(x, sym, cf);
    if (rec.wants("sn_factor_agreement"))
      rec.observe("sn_factor_agreement",
                  max_rel(rec.got("sn_factor_agreement", to_scalar(bf).values), f.values));
    if (rec.wants("sn_projected_inverse_agreement"))
      rec.observe("sn_projected_inverse_agreement",
                  max_rel(rec.got("sn_projected_inverse_agreement", sn_projected_inverse(bf).values()),
                          pinv.values()));
    if (rec.wants("sn_completion_agreement"))
      for (bool factored : {false, true})
        rec.observe("sn_completion_agreement",
                    max_rel(rec.got("sn_completion_agreement",
                                    to_scalar(sn_completion(s, sym, cf, factored)).values),
                            c.values));
  }
  if (rec.wants("sn_singleton_agreement")) {
    const auto cf = std::make_shared<const CliqueForest>(singleton_forest(*sym));
    const auto bf = sn_factor(x, sym, cf);
    double e = max_rel(rec.got("sn_singleton_agreement", to_scalar(bf).values), f.values);
    e = std::max(e, max_rel(sn_projected_inverse(bf).values(), pinv.values()));
    e = std::max(e, max_rel(to_scalar(sn_completion(s, sym, cf)).values, c.values));
    rec.observe("sn_singleton_agreement", e);
  }
}

void oracle_case(Recorder& rec, int n, std::uint64_t seed) {
  const auto v = shared(random_pattern(n, seed));
  const auto x = oracle::gen_spd(v, seed);
  const auto xd = oracle::to_dense(x);
  if (rec.wants("hessian_matrix_symmetry")) {
    const auto h = rec.got("hessian_matrix_symmetry", oracle::dense_hessian_matrix(xd, *v));
    rec.observe("hessian_matrix_symmetry", (h - h.transpose()).norm() / h.norm());
  }
  if (rec.wants("finite_difference_gradient")) {
    const auto want = oracle::dense_project(-oracle::dense_inverse(xd), v);
    rec.observe("finite_difference_gradient",
                relative_difference(rec.got("finite_difference_gradient",
                                            oracle::finite_diff_gradient(x, 1e-5)),
                                    want));
  }
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s = {"symbolic", "chordal", "multifrontal",
                                             "hessian", "supernodal", "oracle"};
  return s;
}

std::vector<std::string> verify_properties() {
  std::vector<std::string> out;
  for (const auto& p : kProperties) out.push_back(key(p));
  return out;
}

std::vector<PropertyResult> run_verify(const VerifyOptions& opt) {
  for (const auto& s : opt.suites)
    if (std::find(verify_suites().begin(), verify_suites().end(), s) == verify_suites().end())
      throw InvalidArgument("unknown suite '" + s + "'");
  if (opt.max_n < 2 || opt.trials < 1) throw InvalidArgument("need max_n >= 2 and trials >= 1");
  Recorder rec(opt);
  bool inject_found = opt.inject.empty();
  for (const auto& p : kProperties) {
    if (!opt.suites.empty() &&
        std::find(opt.suites.begin(), opt.suites.end(), p.suite) == opt.suites.end())
      continue;
    rec.enable(p);
    inject_found |= opt.inject == p.name || opt.inject == key(p);
  }
  if (!inject_found) throw InvalidArgument("unknown injection target '" + opt.inject + "'");

  auto on = [&](const char* suite) {
    return opt.suites.empty() ||
           std::find(opt.suites.begin(), opt.suites.end(), suite) != opt.suites.end();
  };
  oracle::Rng sizes(opt.seed);
  for (int t = 0; t < opt.trials; ++t) {
    const int n = 2 + sizes.below(opt.max_n - 1);
    const int small = 2 + sizes.below(14);
    const std::uint64_t seed = opt.seed * 100003 + t;
    const auto sym = etree_only(random_pattern(n, seed));
    if (on("symbolic")) symbolic_suite(rec, n, seed);
    if (on("chordal")) chordal_suite(rec, sym);
    if (on("multifrontal")) multifrontal_suite(rec, sym, seed);
    if (on("hessian")) {
      hessian_suite(rec, sym, seed);
      dual_hessian_case(rec, small, seed);
    }
    if (on("supernodal")) supernodal_suite(rec, sym, seed);
    if (on("oracle")) oracle_case(rec, small, seed);
  }
  return rec.take();
}

void print_report(std::ostream& out, const std::vector<PropertyResult>& results) {
  for (const auto& r : results) {
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-13s %-34s tol=%-8.1e worst=%-10.3e cases=%d\n",
                  r.passed ? "ok" : "FAIL", r.suite.c_str(), r.name.c_str(), r.tolerance,
                  r.worst, r.cases);
    out << line;
  }
}

}  // namespace logdet

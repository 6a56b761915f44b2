#include "logdet/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "logdet/chordal.hpp"
#include "logdet/hessian.hpp"
#include "logdet/mmio.hpp"
#include "logdet/multifrontal.hpp"
#include "logdet/oracle.hpp"
#include "logdet/ordering.hpp"
#include "logdet/supernodal.hpp"

namespace logdet {

void write_csv_header(std::ostream& out) {
  out << "algorithm,pattern_kind,n,w_or_file,rep,seconds,checksum,counter1,counter2\n";
}

void write_csv_row(std::ostream& out, const BenchRecord& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.6e", r.seconds);
  out << r.algorithm << ',' << r.pattern_kind << ',' << r.n << ',' << r.w_or_file << ','
      << r.rep << ',' << secs << ',' << r.checksum << ',' << r.counter1 << ',' << r.counter2
      << '\n';
}

std::string format_checksum(double sum) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", sum);
  return buf;
}

PatternSpec make_pattern(const std::string& kind, int n, int w, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("n must be positive");
  if (w < 1) throw InvalidArgument("w must be positive");
  PatternSpec spec{kind, n, std::to_string(w), nullptr};
  if (kind == "band" || kind == "arrow") {
    if (n <= 3 * w)
      throw InvalidArgument("need n > 3w (n=" + std::to_string(n) + ", w=" + std::to_string(w) + ")");
    spec.sym = etree_only(kind == "band" ? oracle::band_pattern(n, w)
                                         : oracle::arrow_pattern(n, w));
  } else if (kind == "random-chordal") {
    spec.sym = etree_only(oracle::gen_chordal(n, std::min(1.0, double(w) / n), seed));
  } else {
    throw InvalidArgument("unknown pattern kind '" + kind + "'");
  }
  return spec;
}

PatternSpec load_pattern_file(const std::string& path, std::ostream& warn) {
  const auto mm = read_matrix_market(path);
  if (mm.mirrored > 0)
    warn << "warning: " << path << ": " << mm.mirrored
         << " entries above the diagonal were mirrored\n";
  const auto order = order_heuristic(mm.pattern);
  auto name = path.substr(path.find_last_of('/') + 1);
  return {"file", mm.pattern.n(), name, fill_pattern(mm.pattern, order)};
}

std::size_t predicted_front_bytes(const SymbolicAnalysis& sym) {
  const std::size_t mf = sym.max_front_order();
  // Two-front reverse sweeps, the forward stack and the work buffers.
  return sizeof(double) *
         (2 * sym.reverse_stack_peak() + sym.forward_stack_peak() + 4 * mf * mf);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Output {
  std::vector<double> values;
  SweepCounters counters;
};

// Instance data on one pattern, built on demand outside the timed region.
class Context {
 public:
  Context(const PatternSpec& spec, std::uint64_t seed) : spec_(spec), seed_(seed) {}

  const SymbolicPtr& sym() const { return spec_.sym; }
  const PatternPtr& v() const { return spec_.sym->pattern_ptr(); }
  const SparseSymMatrix& x() {
    if (!x_) x_ = oracle::gen_spd(v(), seed_);
    return *x_;
  }
  const SparseSymMatrix& s() {
    if (!s_) s_ = oracle::gen_completable(v(), seed_ + 1);
    return *s_;
  }
  const SparseSymMatrix& y() {
    if (!y_) y_ = oracle::gen_direction(v(), seed_ + 2);
    return *y_;
  }
  const CholeskyFactor& f() {
    if (!f_) f_ = factor(x(), sym());
    return *f_;
  }
  const HessianContext& hess() {
    if (!h_) {
      h_ = std::make_unique<HessianContext>(f());
      h_->warm();
    }
    return *h_;
  }
  const CliqueForestPtr& cf() {
    if (!cf_) cf_ = std::make_shared<const CliqueForest>(clique_tree(*sym()));
    return cf_;
  }
  const BlockCholeskyFactor& bf() {
    if (!bf_) bf_ = sn_factor(x(), sym(), cf());
    return *bf_;
  }
  const oracle::DenseSym& xd() {
    if (!xd_) xd_ = oracle::to_dense(x());
    return *xd_;
  }
  const oracle::DenseSym& xinv() {
    if (!xi_) xi_ = oracle::dense_inverse(xd());
    return *xi_;
  }

 private:
  const PatternSpec& spec_;
  std::uint64_t seed_;
  std::optional<SparseSymMatrix> x_, s_, y_;
  std::optional<CholeskyFactor> f_;
  std::unique_ptr<HessianContext> h_;
  CliqueForestPtr cf_;
  std::optional<BlockCholeskyFactor> bf_;
  std::optional<oracle::DenseSym> xd_, xi_;
};

Output values_of(SparseSymMatrix a, SweepCounters c = {}) {
  return {std::move(a.values()), c};
}

Eigen::MatrixXd dense_ldlt(const std::vector<double>& values, const SparsityPattern& v) {
  const int n = v.n();
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd d(n);
  for (int j = 0; j < n; ++j) {
    d[j] = values[v.col_begin(j)];
    for (int q = v.col_begin(j) + 1; q < v.col_end(j); ++q) l(v.rowind()[q], j) = values[q];
  }
  return l * d.asDiagonal() * l.transpose();
}

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

SparseSymMatrix as_matrix(Context& c, const Output& o) { return {c.v(), o.values}; }

SparseSymMatrix dense_hess(Context& c, const SparseSymMatrix& y) {
  return oracle::dense_project(c.xinv() * oracle::to_dense(y) * c.xinv(), c.v());
}

struct Algorithm {
  std::function<Output(Context&)> run;
  // Relative error of the result against a dense oracle.
  std::function<double(Context&, const Output&)> check;
  double tolerance;
};

double factor_error(Context& c, const Output& o) {
  return rel(dense_ldlt(o.values, *c.v()), c.xd());
}

double completion_error(Context& c, const Output& o) {
  const auto xhat = dense_ldlt(o.values, *c.v());
  return relative_difference(oracle::dense_project(oracle::dense_inverse(xhat), c.v()), c.s());
}

double projinv_error(Context& c, const Output& o) {
  return relative_difference(as_matrix(c, o), oracle::dense_project(c.xinv(), c.v()));
}

const std::map<std::string, Algorithm>& algorithms() {
  static const std::map<std::string, Algorithm> table = {
      {"factor",
       {[](Context& c) {
          SweepCounters k;
          auto f = factor(c.x(), c.sym(), &k);
          return Output{std::move(f.values), k};
        },
        factor_error, 1e-12}},
      {"product",
       {[](Context& c) { return values_of(product(c.f())); },
        [](Context& c, const Output& o) { return rel(oracle::to_dense(as_matrix(c, o)), c.xd()); },
        1e-12}},
      {"projected_inverse",
       {[](Context& c) { return values_of(projected_inverse(c.f())); }, projinv_error, 1e-10}},
      {"completion",
       {[](Context& c) {
          SweepCounters k;
          auto f = completion(c.s(), c.sym(), &k);
          return Output{std::move(f.values), k};
        },
        completion_error, 1e-9}},
      {"completion_factored",
       {[](Context& c) {
          SweepCounters k;
          auto f = completion_factored(c.s(), c.sym(), &k);
          return Output{std::move(f.values), k};
        },
        completion_error, 1e-9}},
      {"barrier_value",
       {[](Context& c) { return Output{{barrier_value(c.x(), c.sym())}, {}}; },
        [](Context& c, const Output& o) {
          const double want = -oracle::dense_logdet(c.xd());
          return std::abs(o.values[0] - want) / std::max(1.0, std::abs(want));
        },
        1e-10}},
      {"dual_barrier_value",
       {[](Context& c) { return Output{{dual_barrier_value(c.s(), c.sym())}, {}}; },
        [](Context& c, const Output& o) {
          // log det Xhat - n with Xhat from the plain completion.
          const auto xhat = dense_ldlt(completion(c.s(), c.sym()).values, *c.v());
          const double want = oracle::dense_logdet(xhat) - c.sym()->n();
          return std::abs(o.values[0] - want) / std::max(1.0, std::abs(want));
        },
        1e-10}},
      {"hess_apply",
       {[](Context& c) { return values_of(hess_apply(c.hess(), c.y())); },
        [](Context& c, const Output& o) {
          return relative_difference(as_matrix(c, o), dense_hess(c, c.y()));
        },
        1e-9}},
      {"hess_solve",
       {[](Context& c) { return values_of(hess_solve(c.hess(), c.y())); },
        [](Context& c, const Output& o) {
          return relative_difference(dense_hess(c, as_matrix(c, o)), c.y());
        },
        1e-8}},
      {"hess_factor",
       {[](Context& c) { return values_of(hess_factor_apply(c.hess(), c.y())); },
        [](Context& c, const Output& o) {
          const auto w = as_matrix(c, o);
          const double want = inner(c.y(), dense_hess(c, c.y()));
          return std::abs(inner(w, w) - want) / want;
        },
        1e-9}},
      {"hess_factor_adjoint",
       {[](Context& c) { return values_of(hess_factor_adjoint(c.hess(), c.y())); },
        [](Context& c, const Output&) {
          const auto rr = hess_factor_adjoint(c.hess(), hess_factor_apply(c.hess(), c.y()));
          return relative_difference(rr, dense_hess(c, c.y()));
        },
        1e-9}},
      {"sn_factor",
       {[](Context& c) {
          SweepCounters k;
          auto f = sn_factor(c.x(), c.sym(), c.cf(), &k);
          return Output{to_scalar(f).values, k};
        },
        factor_error, 1e-11}},
      {"sn_projected_inverse",
       {[](Context& c) { return values_of(sn_projected_inverse(c.bf())); }, projinv_error,
        1e-10}},
      {"sn_completion",
       {[](Context& c) {
          SweepCounters k;
          auto f = sn_completion(c.s(), c.sym(), c.cf(), false, &k);
          return Output{to_scalar(f).values, k};
        },
        completion_error, 1e-9}},
      {"sn_completion_factored",
       {[](Context& c) {
          SweepCounters k;
          auto f = sn_completion(c.s(), c.sym(), c.cf(), true, &k);
          return Output{to_scalar(f).values, k};
        },
        completion_error, 1e-9}},
  };
  return table;
}

double median(std::vector<double> t) {
  std::sort(t.begin(), t.end());
  const std::size_t k = t.size() / 2;
  return t.size() % 2 ? t[k] : 0.5 * (t[k - 1] + t[k]);
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e;
  return s;
}

void check_memory(const PatternSpec& spec, std::size_t cap) {
  const std::size_t need = predicted_front_bytes(*spec.sym);
  if (need > cap)
    throw ResourceLimit("instance needs about " + std::to_string(need >> 20) +
                        " MiB of dense fronts, above the cap of " + std::to_string(cap >> 20) +
                        " MiB");
}

}  // namespace

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, alg] : algorithms()) out.push_back(name);
    return out;
  }();
  return names;
}

std::vector<std::string> parse_algorithms(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    if (name == "all") {
      out.insert(out.end(), algorithm_names().begin(), algorithm_names().end());
      continue;
    }
    if (!algorithms().count(name)) throw InvalidArgument("unknown algorithm '" + name + "'");
    out.push_back(name);
  }
  if (out.empty()) throw InvalidArgument("no algorithms selected");
  return out;
}

BenchResult run_bench(const PatternSpec& spec, const BenchOptions& opt) {
  check_memory(spec, opt.mem_cap);
  if (opt.reps < 1) throw InvalidArgument("reps must be positive");
  Context ctx(spec, opt.seed);
  BenchResult res;
  for (const auto& name : opt.algorithms) {
    const auto& alg = algorithms().at(name);
    std::vector<double> times;
    // Untimed first call builds the lazily generated inputs.
    Output out = alg.run(ctx);
    std::string checksum = format_checksum(sum(out.values));
    for (int r = 0; r < opt.reps; ++r) {
      const auto t0 = Clock::now();
      out = alg.run(ctx);
      times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
      const auto cs = format_checksum(sum(out.values));
      if (cs != checksum)
        throw NumericalBreakdown(0, name + " is not deterministic across repetitions");
      checksum = cs;
    }
    res.records.push_back({name, spec.kind, spec.n, spec.w_or_file, opt.reps, median(times),
                           checksum, out.counters.frontal_assemblies, out.counters.reflections});
    if (spec.n <= opt.verify_cap) {
      const double err = alg.check(ctx, out);
      res.checks.push_back(
          {name, spec.kind + ":" + spec.w_or_file, err, alg.tolerance, err <= alg.tolerance});
    }
  }
  return res;
}

SparseHessianResult run_sparse_hessian(const PatternSpec& spec, const SparseHessianOptions& opt) {
  check_memory(spec, opt.mem_cap);
  if (opt.reps < 1 || opt.trials < 1 || opt.nnz < 0)
    throw InvalidArgument("trials and reps must be positive, nnz non-negative");
  Context ctx(spec, opt.seed);
  const auto& hc = ctx.hess();
  const auto& v = *ctx.v();
  SparseHessianResult res;
  auto time_median = [&](const std::function<void()>& fn) {
    std::vector<double> t;
    for (int r = 0; r < opt.reps; ++r) {
      const auto t0 = Clock::now();
      fn();
      t.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return median(t);
  };
  for (int trial = 1; trial <= opt.trials; ++trial) {
    oracle::Rng rng(opt.seed * 1000003 + trial);
    SparseSymMatrix y(ctx.v());
    std::vector<int> support;
    const std::size_t want = std::min<std::size_t>(opt.nnz, v.nnz());
    std::size_t placed = 0;
    if (want == v.nnz()) {
      for (double& e : y.values()) e = rng.uniform(0.5, 1.5);
      placed = want;
    }
    while (placed < want) {
      const auto q = static_cast<std::size_t>(rng.below(static_cast<int>(v.nnz())));
      if (y.values()[q] != 0.0) continue;
      y.values()[q] = rng.uniform(0.5, 1.5);
      ++placed;
    }
    for (int j = 0; j < v.n(); ++j)
      for (int q = v.col_begin(j); q < v.col_end(j); ++q)
        if (y.values()[q] != 0.0) {
          support.push_back(j);
          break;
        }

    SparseSymMatrix full;
    SparseFactorResult pruned;
    const double tu = time_median([&] { full = hess_factor_apply(hc, y); });
    const double tp = time_median([&] { pruned = hess_factor_apply_sparse(hc, y, support); });
    double diff = 0.0;
    for (std::size_t q = 0; q < v.nnz(); ++q)
      diff = std::max(diff, std::abs(full.values()[q] - pruned.value.values()[q]));
    res.max_difference = std::max(res.max_difference, diff);
    res.records.push_back({"hess_factor", spec.kind, spec.n, spec.w_or_file, trial, tu,
                           format_checksum(sum(full.values())),
                           static_cast<std::size_t>(v.n()), placed});
    res.records.push_back({"hess_factor_sparse", spec.kind, spec.n, spec.w_or_file, trial, tp,
                           format_checksum(sum(pruned.value.values())), pruned.nodes_visited,
                           placed});
    res.ratios.push_back(tu / std::max(tp, 1e-12));
  }
  res.mean_ratio = sum(res.ratios) / static_cast<double>(res.ratios.size());
  return res;
}

}  // namespace logdet

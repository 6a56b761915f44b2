#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "common.hpp"
#include "logdet/bench.hpp"
#include "logdet/mmio.hpp"
#include "logdet/ordering.hpp"
#include "logdet/verify.hpp"

using namespace logdet;

namespace {

const std::string kData = LOGDET_TEST_DATA;
const std::string kExe = LOGDET_BENCH_EXE;

MatrixMarketPattern parse(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_market(in);
}

int parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

// Equal except for the timing column.
void expect_same_csv(std::istream& got, const std::string& golden_path) {
  std::ifstream golden(golden_path);
  ASSERT_TRUE(golden) << golden_path;
  const auto a = read_csv(got), b = read_csv(golden);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    ASSERT_EQ(a[r].size(), 9u) << "row " << r;
    ASSERT_EQ(b[r].size(), 9u) << "row " << r;
    for (int c = 0; c < 9; ++c)
      if (c != 5 || r == 0) EXPECT_EQ(a[r][c], b[r][c]) << "row " << r << " column " << c;
  }
}

int run(const std::string& args, std::string* out = nullptr) {
  const auto tmp = std::filesystem::temp_directory_path() / "logdet_cli_test.out";
  const int st = std::system((kExe + " " + args + " > " + tmp.string() + " 2>/dev/null").c_str());
  if (out) {
    std::ifstream in(tmp);
    *out = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::size_t fill_nnz(const SparsityPattern& raw, const std::vector<int>& order) {
  return fill_pattern(raw, order)->pattern().nnz();
}

}  // namespace

TEST(MatrixMarket, ReadsPattern17Fixture) {
  const auto mm = read_matrix_market(kData + "/pattern17.mtx");
  EXPECT_EQ(mm.pattern, oracle::pattern17());
  EXPECT_EQ(mm.mirrored, 0u);
}

TEST(MatrixMarket, MirrorsUpperEntriesAndReadsValues) {
  const auto mm = parse(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 3\n1 1 2.0\n1 3 -1\n2 1 "
      "0.5\n");
  EXPECT_EQ(mm.mirrored, 1u);
  EXPECT_TRUE(mm.pattern.contains(2, 0));
  EXPECT_TRUE(mm.pattern.contains(1, 0));
  EXPECT_FALSE(mm.pattern.contains(2, 1));
}

TEST(MatrixMarket, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n"), 1);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix array real symmetric\n2 2\n"), 1);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate complex symmetric\n"), 1);
  EXPECT_EQ(parse_error_line("hello\n"), 1);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate pattern symmetric\n%\n2 3 1\n"), 3);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate pattern symmetric\n2 2 2\n1 1\nx 1\n"), 4);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate pattern symmetric\n2 2 1\n3 1\n"), 3);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1\n"), 3);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate pattern symmetric\n2 2 3\n1 1\n2 1\n"), 4);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate pattern symmetric\n2 2 1\n1 1\n2 2\n"), 4);
  EXPECT_THROW(read_matrix_market(kData + "/missing.mtx"), InvalidArgument);
}

TEST(Ordering, BandKeepsItsFill) {
  const auto band = oracle::band_pattern(40, 3);
  const auto order = order_heuristic(band);
  EXPECT_EQ(fill_nnz(band, order), band.nnz());
}

TEST(Ordering, StarLeavesFirst) {
  std::vector<std::vector<int>> rows(6);
  for (int i = 1; i < 6; ++i) rows[0].push_back(i);
  const auto star = SparsityPattern::from_columns(6, rows);
  const auto order = order_heuristic(star);
  // Center and last leaf tie at degree 1; the smaller vertex goes first.
  EXPECT_EQ(order, (std::vector<int>{1, 2, 3, 4, 0, 5}));
  EXPECT_EQ(fill_nnz(star, order), star.nnz());
}

TEST(Ordering, NoWorseThanNaturalOrder) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    oracle::Rng rng(seed);
    std::vector<std::vector<int>> rows(100);
    for (int j = 0; j < 100; ++j)
      for (int i = j + 1; i < 100; ++i)
        if (rng.uniform() < 0.03) rows[j].push_back(i);
    const auto raw = SparsityPattern::from_columns(100, rows);
    const auto order = order_heuristic(raw);
    std::vector<int> sorted = order, natural(100);
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k < 100; ++k) natural[k] = k;
    EXPECT_EQ(sorted, natural);
    EXPECT_LE(fill_nnz(raw, order), fill_nnz(raw, natural)) << seed;
    EXPECT_EQ(order_heuristic(raw), order);
  }
}

TEST(Bench, ArgumentValidation) {
  EXPECT_THROW(parse_algorithms("factor,nonsense"), InvalidArgument);
  EXPECT_EQ(parse_algorithms("factor,,product").size(), 2u);
  EXPECT_EQ(parse_algorithms("all"), algorithm_names());
  EXPECT_THROW(make_pattern("band", 30, 10, 1), InvalidArgument);
  EXPECT_THROW(make_pattern("arrow", 30, 10, 1), InvalidArgument);
  EXPECT_THROW(make_pattern("blob", 30, 1, 1), InvalidArgument);
  EXPECT_NO_THROW(make_pattern("band", 31, 10, 1));
}

TEST(Bench, CsvHeader) {
  std::ostringstream out;
  write_csv_header(out);
  EXPECT_EQ(out.str(), "algorithm,pattern_kind,n,w_or_file,rep,seconds,checksum,counter1,counter2\n");
  EXPECT_EQ(format_checksum(1.0 / 3.0), "0.3333333333");
}

TEST(Bench, TridiagonalRunsAndVerifies) {
  BenchOptions opt;
  opt.algorithms = algorithm_names();
  opt.reps = 3;
  const auto res = run_bench(make_pattern("band", 50, 1, 1), opt);
  ASSERT_EQ(res.checks.size(), opt.algorithms.size());
  for (const auto& c : res.checks) EXPECT_TRUE(c.passed) << c.algorithm << " " << c.error;
  for (const auto& r : res.records) EXPECT_EQ(r.rep, 3);
}

TEST(Bench, ChecksumMatchesDenseFactor) {
  PatternSpec spec{"fixture", 17, "pattern17", testing_util::analyse(oracle::pattern17())};
  BenchOptions opt;
  opt.algorithms = {"factor", "projected_inverse"};
  opt.reps = 1;
  const auto res = run_bench(spec, opt);
  const auto x = oracle::gen_spd(spec.sym->pattern_ptr(), opt.seed);
  const auto ldl = oracle::dense_ldl(oracle::to_dense(x));
  const auto& v = spec.sym->pattern();
  double factor_sum = 0.0, inv_sum = 0.0;
  const auto xi = oracle::dense_inverse(oracle::to_dense(x));
  for (int j = 0; j < 17; ++j) {
    factor_sum += ldl.d[j];
    inv_sum += xi(j, j);
    for (int i : v.below(j)) {
      factor_sum += ldl.l(i, j);
      inv_sum += xi(i, j);
    }
  }
  EXPECT_NEAR(std::stod(res.records[0].checksum), factor_sum, 1e-9 * std::abs(factor_sum));
  EXPECT_NEAR(std::stod(res.records[1].checksum), inv_sum, 1e-9 * std::abs(inv_sum));
  EXPECT_EQ(res.records[0].counter1, 17u);
}

TEST(Bench, ArrowFactoredCompletionHasNoReflections) {
  BenchOptions opt;
  opt.algorithms = {"completion_factored", "sn_completion_factored"};
  opt.reps = 1;
  opt.verify_cap = 0;
  const auto res = run_bench(make_pattern("arrow", 400, 50, 1), opt);
  for (const auto& r : res.records) EXPECT_EQ(r.counter2, 0u) << r.algorithm;
  EXPECT_TRUE(res.checks.empty());
  const auto band = run_bench(make_pattern("band", 400, 50, 1), opt);
  EXPECT_GT(band.records[0].counter2, 0u);
}

TEST(Bench, MemoryCap) {
  BenchOptions opt;
  opt.algorithms = {"factor"};
  opt.mem_cap = 1000;
  EXPECT_THROW(run_bench(make_pattern("band", 100, 10, 1), opt), ResourceLimit);
}

TEST(Bench, GoldenFiles) {
  BenchOptions opt;
  opt.algorithms = algorithm_names();
  opt.reps = 1;
  std::ostringstream warn;
  const std::vector<std::pair<std::vector<PatternSpec>, std::string>> cases = {
      {{load_pattern_file(kData + "/pattern17.mtx", warn)}, "golden_pattern17.csv"},
      {{make_pattern("band", 60, 1, 1), make_pattern("band", 60, 4, 1)}, "golden_band.csv"},
      {{make_pattern("arrow", 60, 4, 1)}, "golden_arrow.csv"},
  };
  for (const auto& [specs, golden] : cases) {
    std::stringstream csv;
    write_csv_header(csv);
    for (const auto& spec : specs)
      for (const auto& r : run_bench(spec, opt).records) write_csv_row(csv, r);
    expect_same_csv(csv, kData + "/" + golden);
  }
  EXPECT_TRUE(warn.str().empty());
}

TEST(SparseHessian, PrunedAgreesAndZeroArgumentVisitsNothing) {
  const auto spec = make_pattern("band", 300, 10, 1);
  SparseHessianOptions opt;
  opt.trials = 4;
  opt.reps = 1;
  auto res = run_sparse_hessian(spec, opt);
  EXPECT_LE(res.max_difference, 1e-12);
  ASSERT_EQ(res.records.size(), 8u);
  EXPECT_EQ(res.records[0].algorithm, "hess_factor");
  EXPECT_EQ(res.records[1].algorithm, "hess_factor_sparse");
  EXPECT_EQ(res.records[0].checksum, res.records[1].checksum);
  EXPECT_EQ(res.records[1].counter2, 2u);

  opt.nnz = 0;
  res = run_sparse_hessian(spec, opt);
  for (std::size_t r = 1; r < res.records.size(); r += 2) EXPECT_EQ(res.records[r].counter1, 0u);

  opt.nnz = 1 << 30;
  res = run_sparse_hessian(spec, opt);
  for (std::size_t r = 1; r < res.records.size(); r += 2) EXPECT_EQ(res.records[r].counter1, 300u);
}

TEST(Verify, DefaultRunPassesAndIsDeterministic) {
  const auto a = run_verify({});
  const auto b = run_verify({});
  EXPECT_EQ(a.size(), verify_properties().size());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i].passed) << a[i].name << " " << a[i].worst;
    EXPECT_EQ(a[i].worst, b[i].worst);
  }
}

TEST(Verify, InjectionFailsOnlyTheTarget) {
  for (const std::string target : {"hess_apply_dense", "multifrontal.completion_roundtrip",
                                   "clique_tree_valid", "hessian_matrix_symmetry"}) {
    VerifyOptions opt;
    opt.inject = target;
    opt.trials = 3;
    for (const auto& r : run_verify(opt)) {
      const bool targeted = target == r.name || target == r.suite + "." + r.name;
      EXPECT_EQ(r.passed, !targeted) << target << " " << r.name;
    }
  }
  VerifyOptions bad;
  bad.inject = "nope";
  EXPECT_THROW(run_verify(bad), InvalidArgument);
  bad.inject.clear();
  bad.suites = {"nope"};
  EXPECT_THROW(run_verify(bad), InvalidArgument);
}

TEST(Executable, ExitCodes) {
  EXPECT_EQ(run("verify --trials 3"), 0);
  EXPECT_EQ(run("verify --trials 3 --inject sn_factor_agreement"), 1);
  EXPECT_EQ(run("bench --pattern file --file " + kData + "/missing.mtx"), 2);
  const auto general = write_temp("logdet_general.mtx",
                                  "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n");
  EXPECT_EQ(run("bench --pattern file --file " + general), 2);
  EXPECT_EQ(run("bench --pattern band --n 30 --w 10"), 2);
  EXPECT_EQ(run("bench --no-such-flag"), 2);
  EXPECT_EQ(run("bench --algorithms factor,bogus"), 2);
  EXPECT_EQ(run("bench --pattern band --n 1000 --w 300 --mem-cap 1MB"), 2);
}

TEST(Executable, GoldenCsv) {
  std::string out;
  ASSERT_EQ(run("bench --pattern file --file " + kData +
                    "/pattern17.mtx --algorithms all --reps 2 --seed 1",
                &out),
            0);
  // rep holds the repetition count, so compare against a rewritten golden.
  std::istringstream got(out);
  auto rows = read_csv(got);
  std::stringstream fixed;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r > 0) rows[r][4] = "1";
    for (int c = 0; c < 9; ++c) fixed << rows[r][c] << (c < 8 ? "," : "\n");
  }
  expect_same_csv(fixed, kData + "/golden_pattern17.csv");
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "logdet/errors.hpp"
#include "logdet/symbolic.hpp"

namespace logdet {

// CSV columns: algorithm,pattern_kind,n,w_or_file,rep,seconds,checksum,counter1,counter2
struct BenchRecord {
  std::string algorithm;
  std::string pattern_kind;
  int n = 0;
  std::string w_or_file;
  int rep = 0;
  double seconds = 0.0;
  std::string checksum;
  std::size_t counter1 = 0;
  std::size_t counter2 = 0;
};

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const BenchRecord& r);
// Sum of the result entries, 10 significant digits.
std::string format_checksum(double sum);

// Refusal to run an instance above the memory cap.
class ResourceLimit : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct PatternSpec {
  std::string kind;  // band, arrow, random-chordal or file
  int n = 0;
  std::string w_or_file;
  SymbolicPtr sym;
};

// band and arrow need n > 3w. For random-chordal each lower position is
// present with probability w / n before fill.
PatternSpec make_pattern(const std::string& kind, int n, int w, std::uint64_t seed);
// Reads a Matrix Market file, orders it with order_heuristic and fills it.
// Prints a warning to `warn` when upper-triangle entries were mirrored.
PatternSpec load_pattern_file(const std::string& path, std::ostream& warn);

// Estimate of the bytes held in dense fronts, stacks and work buffers by the
// heaviest sweep on sym.
std::size_t predicted_front_bytes(const SymbolicAnalysis& sym);

const std::vector<std::string>& algorithm_names();
// Comma separated list; throws InvalidArgument on unknown names.
std::vector<std::string> parse_algorithms(const std::string& list);

struct BenchOptions {
  std::vector<std::string> algorithms;
  int reps = 3;
  std::uint64_t seed = 1;
  int verify_cap = 200;
  std::size_t mem_cap = std::size_t{1} << 30;
};

struct CheckOutcome {
  std::string algorithm;
  std::string pattern;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct BenchResult {
  std::vector<BenchRecord> records;
  std::vector<CheckOutcome> checks;
};

// One record per algorithm: rep holds the number of timed repetitions and
// seconds their median. Results are cross-checked against dense oracles
// when n <= verify_cap. Throws ResourceLimit above mem_cap.
BenchResult run_bench(const PatternSpec& spec, const BenchOptions& opt);

struct SparseHessianOptions {
  int trials = 10;
  int nnz = 2;
  int reps = 3;
  std::uint64_t seed = 1;
  std::size_t mem_cap = std::size_t{1} << 30;
};

struct SparseHessianResult {
  // Two records per trial (hess_factor, hess_factor_sparse) with rep = trial
  // number, counter1 = columns visited, counter2 = argument nonzeros.
  std::vector<BenchRecord> records;
  std::vector<double> ratios;  // unpruned / pruned time per trial
  double mean_ratio = 0.0;
  double max_difference = 0.0;
};

SparseHessianResult run_sparse_hessian(const PatternSpec& spec,
                                       const SparseHessianOptions& opt);

}  // namespace logdet

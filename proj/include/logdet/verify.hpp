#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace logdet {

struct PropertyResult {
  std::string suite;
  std::string name;
  double tolerance = 0.0;
  double worst = 0.0;
  int cases = 0;
  bool passed = true;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int trials = 20;
  // Random patterns have order in [2, max_n].
  int max_n = 60;
  // Suites to run (symbolic, chordal, multifrontal, hessian, supernodal,
  // oracle); empty selects all.
  std::vector<std::string> suites;
  // Property whose computed side is perturbed before comparison.
  std::string inject;
};

const std::vector<std::string>& verify_suites();
// Every property as "suite.name".
std::vector<std::string> verify_properties();

// Throws InvalidArgument for unknown suites or an unknown injection target.
std::vector<PropertyResult> run_verify(const VerifyOptions& opt);

void print_report(std::ostream& out, const std::vector<PropertyResult>& results);

}  // namespace logdet

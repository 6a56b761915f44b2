#pragma once

#include <cstddef>
#include <istream>
#include <string>

#include "logdet/errors.hpp"
#include "logdet/pattern.hpp"

namespace logdet {

// Malformed input file. line() is 1-based, 0 when no line applies.
class ParseError : public InvalidArgument {
 public:
  ParseError(int line, const std::string& what)
      : InvalidArgument(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct MatrixMarketPattern {
  SparsityPattern pattern;
  // Entries given above the diagonal and stored at their mirror image.
  std::size_t mirrored = 0;
};

// Reads the nonzero pattern of a symmetric Matrix Market coordinate file
// (pattern, real or integer field). Values are ignored.
MatrixMarketPattern read_matrix_market(std::istream& in);
MatrixMarketPattern read_matrix_market(const std::string& path);

}  // namespace logdet

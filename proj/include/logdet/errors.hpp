#pragma once

#include <stdexcept>
#include <string>

namespace logdet {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A pattern that was required to be filled needs fill. The witness is a
// triple i > j > k (0-based) with (i,k), (j,k) in the pattern and (i,j) not.
class NotChordal : public Error {
 public:
  NotChordal(int i, int j, int k)
      : Error("pattern is not filled: (" + std::to_string(i + 1) + "," +
              std::to_string(k + 1) + ") and (" + std::to_string(j + 1) + "," +
              std::to_string(k + 1) + ") present but (" +
              std::to_string(i + 1) + "," + std::to_string(j + 1) +
              ") missing"),
        i_(i), j_(j), k_(k) {}

  int i() const { return i_; }
  int j() const { return j_; }
  int k() const { return k_; }

 private:
  int i_, j_, k_;
};

// Pivot failure during factorization. `where` is a vertex for the
// multifrontal code and a representative vertex for the supernodal code.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(int where)
      : Error("matrix is not positive definite (pivot at column " +
              std::to_string(where + 1) + ")"),
        where_(where) {}
  int column() const { return where_; }

 private:
  int where_;
};

class NoPositiveCompletion : public Error {
 public:
  explicit NoPositiveCompletion(int where)
      : Error("matrix has no positive definite completion (failure at column " +
              std::to_string(where + 1) + ")"),
        where_(where) {}
  int column() const { return where_; }

 private:
  int where_;
};

class NumericalBreakdown : public Error {
 public:
  NumericalBreakdown(int where, const std::string& what)
      : Error(what + " (column " + std::to_string(where + 1) + ")"),
        where_(where) {}
  int column() const { return where_; }

 private:
  int where_;
};

}  // namespace logdet

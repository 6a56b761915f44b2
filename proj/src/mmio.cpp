#include "logdet/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace logdet {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

long long parse_int(const std::string& tok, int line, const char* what) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(line, std::string("bad ") + what + " '" + tok + "'");
  return v;
}

}  // namespace

MatrixMarketPattern read_matrix_market(std::istream& in) {
  std::string text;
  int line = 0;
  if (!std::getline(in, text)) throw ParseError(1, "empty file");
  ++line;
  std::istringstream banner(text);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw ParseError(line, "missing %%MatrixMarket banner");
  if (lower(object) != "matrix") throw ParseError(line, "object must be 'matrix'");
  if (lower(format) != "coordinate") throw ParseError(line, "only coordinate format is supported");
  field = lower(field);
  if (field != "pattern" && field != "real" && field != "integer")
    throw ParseError(line, "unsupported field '" + field + "'");
  if (lower(symmetry) != "symmetric")
    throw ParseError(line, "matrix is not declared symmetric ('" + symmetry + "')");

  // Size line, after comments.
  long long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text) || text[0] == '%') continue;
    std::istringstream ss(text);
    std::string a, b, c, extra;
    if (!(ss >> a >> b >> c) || (ss >> extra))
      throw ParseError(line, "size line must hold three integers");
    rows = parse_int(a, line, "row count");
    cols = parse_int(b, line, "column count");
    nnz = parse_int(c, line, "entry count");
    break;
  }
  if (rows < 0) throw ParseError(line, "missing size line");
  if (rows != cols) throw ParseError(line, "matrix is not square");
  if (rows == 0 || rows > 1'000'000'000 || nnz < 0) throw ParseError(line, "bad dimensions");

  const int n = static_cast<int>(rows);
  const bool with_value = field != "pattern";
  MatrixMarketPattern out;
  std::vector<std::vector<int>> below(n);
  long long seen = 0;
  while (seen < nnz && std::getline(in, text)) {
    ++line;
    if (blank(text) || text[0] == '%') continue;
    std::istringstream ss(text);
    std::string a, b, v;
    if (!(ss >> a >> b) || (with_value && !(ss >> v)))
      throw ParseError(line, with_value ? "expected 'row column value'" : "expected 'row column'");
    const long long i = parse_int(a, line, "row index"), j = parse_int(b, line, "column index");
    if (i < 1 || i > n || j < 1 || j > n) throw ParseError(line, "index out of range");
    int r = static_cast<int>(i - 1), c = static_cast<int>(j - 1);
    if (r < c) {
      std::swap(r, c);
      ++out.mirrored;
    }
    if (r != c) below[c].push_back(r);
    ++seen;
  }
  if (seen < nnz)
    throw ParseError(line, "expected " + std::to_string(nnz) + " entries, found " +
                               std::to_string(seen));
  while (std::getline(in, text)) {
    ++line;
    if (!blank(text) && text[0] != '%') throw ParseError(line, "unexpected data after the last entry");
  }
  for (auto& col : below) {
    std::sort(col.begin(), col.end());
    col.erase(std::unique(col.begin(), col.end()), col.end());
  }
  out.pattern = SparsityPattern::from_columns(n, below);
  return out;
}

MatrixMarketPattern read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return read_matrix_market(in);
}

}  // namespace logdet

#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "permanent/errors.hpp"
#include "permanent/rng.hpp"

namespace permanent {

/// Dense real n x n matrix, row-major, immutable after construction.
/// Every entry is finite; construction rejects NaN and infinities.
class SquareMatrix {
 public:
  /// n x n zero matrix.
  explicit SquareMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {
    if (n == 0) throw ShapeError("matrix dimension must be at least 1");
  }

  /// Takes row-major entries; size must be n*n and all values finite.
  SquareMatrix(std::size_t n, std::vector<double> row_major)
      : n_(n), entries_(std::move(row_major)) {
    if (n == 0) throw ShapeError("matrix dimension must be at least 1");
    if (entries_.size() != n * n)
      throw ShapeError("entry count does not match dimension");
    check_finite();
  }

  /// Row-by-row construction for literals in tests and docs.
  SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : n_(rows.size()) {
    if (n_ == 0) throw ShapeError("matrix dimension must be at least 1");
    entries_.reserve(n_ * n_);
    for (const auto& row : rows) {
      if (row.size() != n_) throw ShapeError("rows must all have length n");
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
    check_finite();
  }

  std::size_t size() const { return n_; }

  /// Entry at (row i, column j), 0-based.
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * n_ + j];
  }

  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * n_, n_};
  }

  std::span<const double> entries() const { return entries_; }

  bool operator==(const SquareMatrix&) const = default;

 private:
  void check_finite() const {
    for (double v : entries_) {
      if (!std::isfinite(v)) throw ValueError("matrix entry is not finite");
    }
  }

  std::size_t n_;
  std::vector<double> entries_;
};

enum class MatrixFormat { csv, json };

enum class GeneratorKind {
  ones,
  identity,
  rademacher_random,
  uniform_random,
  symmetric_positive_definite,
};

/// Recipe for a deterministic test matrix: same (kind, n, seed) always
/// produces the identical matrix. `seed` is ignored by ones/identity.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::ones;
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

namespace detail {

inline constexpr std::uint64_t kMatrixGenDomain = 0x6D61747267656E00ull;

inline double parse_csv_field(std::string_view field) {
  // Tolerate surrounding blanks; the payload itself must be a full literal.
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
    field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t'))
    field.remove_suffix(1);
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ParseError("bad numeric field: '" + std::string(field) + "'");
  return value;
}

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline SquareMatrix matrix_from_rows(std::vector<std::vector<double>> rows) {
  const std::size_t n = rows.size();
  if (n == 0) throw ParseError("input contains no rows");
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n)
      throw ShapeError("expected " + std::to_string(n) + " columns, got " +
                       std::to_string(row.size()));
    flat.insert(flat.end(), row.begin(), row.end());
  }
  for (double v : flat) {
    if (!std::isfinite(v)) throw ValueError("matrix entry is not finite");
  }
  return SquareMatrix(n, std::move(flat));
}

}  // namespace detail

/// Parses CSV (comma-separated literals, newline rows, no header) or JSON
/// (array of n arrays of n numbers) into a matrix. Throws ParseError on
/// malformed text, ShapeError on ragged/non-square data, ValueError on
/// non-finite entries.
inline SquareMatrix parse_matrix(std::string_view text, MatrixFormat format) {
  std::vector<std::vector<double>> rows;
  if (format == MatrixFormat::csv) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      std::string_view line = (eol == std::string_view::npos)
                                  ? text.substr(pos)
                                  : text.substr(pos, eol - pos);
      pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) {
        if (pos > text.size()) break;  // trailing newline
        throw ParseError("empty row in CSV input");
      }
      std::vector<double> row;
      std::size_t field_start = 0;
      while (true) {
        std::size_t comma = line.find(',', field_start);
        std::string_view field =
            (comma == std::string_view::npos)
                ? line.substr(field_start)
                : line.substr(field_start, comma - field_start);
        row.push_back(detail::parse_csv_field(field));
        if (comma == std::string_view::npos) break;
        field_start = comma + 1;
      }
      rows.push_back(std::move(row));
    }
  } else {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::out_of_range& e) {
      // number literal overflowed the double range
      throw ValueError(std::string("bad JSON: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad JSON: ") + e.what());
    }
    if (!doc.is_array() || doc.empty())
      throw ParseError("JSON input must be a non-empty array of arrays");
    for (const auto& row_node : doc) {
      if (!row_node.is_array())
        throw ParseError("JSON rows must be arrays of numbers");
      std::vector<double> row;
      for (const auto& cell : row_node) {
        if (!cell.is_number())
          throw ParseError("JSON entries must be numbers");
        row.push_back(cell.get<double>());
      }
      rows.push_back(std::move(row));
    }
  }
  return detail::matrix_from_rows(std::move(rows));
}

/// Serializes with shortest round-trip decimal literals, so
/// parse_matrix(serialize_matrix(A, f), f) == A bit-exactly in both formats.
inline std::string serialize_matrix(const SquareMatrix& a,
                                    MatrixFormat format) {
  const std::size_t n = a.size();
  if (format == MatrixFormat::csv) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) out.push_back('\n');
      for (std::size_t j = 0; j < n; ++j) {
        if (j > 0) out.push_back(',');
        out += detail::format_double(a(i, j));
      }
    }
    return out;
  }
  nlohmann::json doc = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(a(i, j));
    doc.push_back(std::move(row));
  }
  return doc.dump();
}

/// Builds a deterministic test matrix. Random kinds draw from a stream
/// derived from the seed; ones/identity ignore it.
inline SquareMatrix generate(const GeneratorSpec& spec) {
  const std::size_t n = spec.n;
  if (n == 0) throw ShapeError("matrix dimension must be at least 1");
  std::vector<double> e(n * n, 0.0);
  auto gen = rng::Xoshiro256pp::substream(
      spec.seed ^ detail::kMatrixGenDomain, 0);
  switch (spec.kind) {
    case GeneratorKind::ones:
      e.assign(n * n, 1.0);
      break;
    case GeneratorKind::identity:
      for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
      break;
    case GeneratorKind::rademacher_random:
      for (auto& v : e) v = gen.rademacher();
      break;
    case GeneratorKind::uniform_random:
      for (auto& v : e) v = gen.uniform_pm1();
      break;
    case GeneratorKind::symmetric_positive_definite: {
      // B^T B / n + I/10: Gram term is symmetric bit-for-bit because both
      // (i,j) and (j,i) accumulate the same products in the same order, and
      // the ridge keeps every eigenvalue at or above 1/10.
      std::vector<double> b(n * n);
      for (auto& v : b) v = gen.uniform_pm1();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double dot = 0.0;
          for (std::size_t k = 0; k < n; ++k) dot += b[k * n + i] * b[k * n + j];
          e[i * n + j] = dot / static_cast<double>(n) + (i == j ? 0.1 : 0.0);
        }
      }
      break;
    }
  }
  return SquareMatrix(n, std::move(e));
}

}  // namespace permanent

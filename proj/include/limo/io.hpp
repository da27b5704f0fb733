#pragma once

// Text formats.
//
// Dense dataset:   "m d l" header, then m lines of d reals followed by l binary digits.
// Sparse dataset:  one instance per line, "lab,lab,... idx:val idx:val ..." with
//                  1-based label and feature indices; an empty label field is allowed.
// Score matrix:    "m l" header, then m lines of l reals.
// Binary matrix:   "m l" header, then m lines of l binary digits (labels or predictions).
//
// All parsing is locale-independent; LF and CRLF line endings are accepted.

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "limo/data.hpp"

namespace limo {
namespace io_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string_view::npos)
    lines.pop_back();
  return lines;
}

inline std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<double> parse_real(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

inline std::optional<std::size_t> parse_count(std::string_view tok) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) return std::nullopt;
  return v;
}

inline double finite_real(std::string_view tok, std::size_t line) {
  auto v = parse_real(tok);
  if (!v) throw DataError(line, "not a number: '" + std::string(tok) + "'");
  if (!std::isfinite(*v)) throw DataError(line, "non-finite value: '" + std::string(tok) + "'");
  return *v;
}

inline std::uint8_t binary_digit(std::string_view tok, std::size_t line) {
  if (tok == "0") return 0;
  if (tok == "1") return 1;
  throw DataError(line, "expected a binary label, got '" + std::string(tok) + "'");
}

inline std::vector<std::size_t> header(const std::vector<std::string_view>& lines, std::size_t fields) {
  if (lines.empty()) throw DataError(1, "missing header");
  auto toks = tokens(lines[0]);
  if (toks.size() != fields)
    throw DataError(1, "header must hold " + std::to_string(fields) + " integers");
  std::vector<std::size_t> out;
  for (auto t : toks) {
    auto v = parse_count(t);
    if (!v || *v == 0) throw DataError(1, "header field '" + std::string(t) + "' is not a positive integer");
    out.push_back(*v);
  }
  return out;
}

inline void require_row_count(const std::vector<std::string_view>& lines, std::size_t m) {
  if (lines.size() - 1 < m)
    throw DataError(lines.size() + 1, "expected " + std::to_string(m) + " data rows, file ends early");
  if (lines.size() - 1 > m) throw DataError(m + 2, "unexpected data after the last declared row");
}

inline std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace io_detail

inline Dataset parse_dense(std::string_view text) {
  using namespace io_detail;
  auto lines = split_lines(text);
  auto h = header(lines, 3);
  const std::size_t m = h[0], d = h[1], l = h[2];
  require_row_count(lines, m);
  Matrix x(m, d);
  std::vector<std::uint8_t> bits;
  bits.reserve(m * l);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t line_no = i + 2;
    auto toks = tokens(lines[i + 1]);
    if (toks.size() != d + l)
      throw DataError(line_no, "expected " + std::to_string(d + l) + " fields, found " +
                                   std::to_string(toks.size()));
    for (std::size_t k = 0; k < d; ++k) x(i, k) = finite_real(toks[k], line_no);
    for (std::size_t k = 0; k < l; ++k) bits.push_back(binary_digit(toks[d + k], line_no));
  }
  return Dataset(FeatureMatrix(std::move(x)), LabelMatrix(m, l, std::move(bits)));
}

inline Dataset load_dense(const std::string& path) { return parse_dense(io_detail::read_file(path)); }

inline std::string format_dense(const Dataset& data) {
  std::string out = std::to_string(data.instances()) + " " + std::to_string(data.dimension()) + " " +
                    std::to_string(data.label_count()) + "\n";
  for (Index i = 0; i < data.instances(); ++i) {
    for (Index k = 0; k < data.dimension(); ++k) {
      out += io_detail::format_real(data.features(i, k));
      out += ' ';
    }
    for (Index j = 0; j < data.label_count(); ++j) {
      out += data.labels(i, j) ? '1' : '0';
      out += j + 1 < data.label_count() ? ' ' : '\n';
    }
  }
  return out;
}

inline void save_dense(const std::string& path, const Dataset& data) {
  io_detail::write_file(path, format_dense(data));
}

/// Parses the sparse multi-label format. `dimension` fixes d; otherwise d is
/// the largest feature index seen.
inline Dataset parse_sparse(std::string_view text, std::size_t label_count,
                            std::optional<std::size_t> dimension = std::nullopt) {
  using namespace io_detail;
  detail::require(label_count >= 1, "sparse loader needs a positive label count");
  struct Row {
    std::vector<std::pair<std::size_t, double>> features;
    std::vector<std::size_t> labels;
  };
  std::vector<Row> rows;
  std::size_t max_index = 0;
  auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    auto line = lines[n];
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    Row row;
    std::string_view label_field;
    std::string_view rest = line;
    if (line.front() != ' ' && line.front() != '\t') {
      auto cut = line.find_first_of(" \t");
      label_field = line.substr(0, cut);
      rest = cut == std::string_view::npos ? std::string_view{} : line.substr(cut);
      if (label_field.find(':') != std::string_view::npos) {
        label_field = {};
        rest = line;
      }
    }
    std::set<std::size_t> seen_labels;
    while (!label_field.empty()) {
      auto comma = label_field.find(',');
      auto tok = label_field.substr(0, comma);
      auto v = parse_count(tok);
      if (!v) throw DataError(line_no, "bad label index '" + std::string(tok) + "'");
      if (*v < 1 || *v > label_count)
        throw DataError(line_no, "label index " + std::to_string(*v) + " outside 1.." +
                                     std::to_string(label_count));
      if (seen_labels.insert(*v).second) row.labels.push_back(*v - 1);
      label_field = comma == std::string_view::npos ? std::string_view{} : label_field.substr(comma + 1);
    }
    std::set<std::size_t> seen_features;
    for (auto tok : tokens(rest)) {
      auto colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw DataError(line_no, "expected idx:val, got '" + std::string(tok) + "'");
      auto idx = parse_count(tok.substr(0, colon));
      if (!idx || *idx < 1) throw DataError(line_no, "bad feature index in '" + std::string(tok) + "'");
      if (!seen_features.insert(*idx).second)
        throw DataError(line_no, "duplicate feature index " + std::to_string(*idx));
      if (dimension && *idx > *dimension)
        throw DataError(line_no, "feature index " + std::to_string(*idx) + " exceeds dimension " +
                                     std::to_string(*dimension));
      row.features.emplace_back(*idx - 1, finite_real(tok.substr(colon + 1), line_no));
      max_index = std::max(max_index, *idx);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("sparse file holds no instances");
  const std::size_t d = dimension ? *dimension : max_index;
  if (d == 0) throw DataError("sparse file holds no features");
  Matrix x = Matrix::Zero(rows.size(), d);
  std::vector<std::uint8_t> bits(rows.size() * label_count, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (auto [k, v] : rows[i].features) x(i, k) = v;
    for (auto j : rows[i].labels) bits[i * label_count + j] = 1;
  }
  return Dataset(FeatureMatrix(std::move(x)), LabelMatrix(rows.size(), label_count, std::move(bits)));
}

inline Dataset load_sparse(const std::string& path, std::size_t label_count,
                           std::optional<std::size_t> dimension = std::nullopt) {
  return parse_sparse(io_detail::read_file(path), label_count, dimension);
}

inline ScoreMatrix parse_scores(std::string_view text) {
  using namespace io_detail;
  auto lines = split_lines(text);
  auto h = header(lines, 2);
  require_row_count(lines, h[0]);
  Matrix f(h[0], h[1]);
  for (std::size_t i = 0; i < h[0]; ++i) {
    auto toks = tokens(lines[i + 1]);
    if (toks.size() != h[1])
      throw DataError(i + 2, "expected " + std::to_string(h[1]) + " scores, found " + std::to_string(toks.size()));
    for (std::size_t j = 0; j < h[1]; ++j) f(i, j) = finite_real(toks[j], i + 2);
  }
  return ScoreMatrix(std::move(f));
}

inline ScoreMatrix load_scores(const std::string& path) { return parse_scores(io_detail::read_file(path)); }

inline std::string format_scores(const ScoreMatrix& f) {
  std::string out = std::to_string(f.rows()) + " " + std::to_string(f.cols()) + "\n";
  for (Index i = 0; i < f.rows(); ++i)
    for (Index j = 0; j < f.cols(); ++j) {
      out += io_detail::format_real(f(i, j));
      out += j + 1 < f.cols() ? ' ' : '\n';
    }
  return out;
}

inline void save_scores(const std::string& path, const ScoreMatrix& f) {
  io_detail::write_file(path, format_scores(f));
}

namespace io_detail {

inline std::pair<std::array<std::size_t, 2>, std::vector<std::uint8_t>> parse_bits(std::string_view text) {
  auto lines = split_lines(text);
  auto h = header(lines, 2);
  require_row_count(lines, h[0]);
  std::vector<std::uint8_t> bits;
  bits.reserve(h[0] * h[1]);
  for (std::size_t i = 0; i < h[0]; ++i) {
    auto toks = tokens(lines[i + 1]);
    if (toks.size() != h[1])
      throw DataError(i + 2, "expected " + std::to_string(h[1]) + " entries, found " + std::to_string(toks.size()));
    for (auto t : toks) bits.push_back(binary_digit(t, i + 2));
  }
  return {{h[0], h[1]}, std::move(bits)};
}

inline std::string format_bits(const detail::BitGrid& g) {
  std::string out = std::to_string(g.rows()) + " " + std::to_string(g.cols()) + "\n";
  for (Index i = 0; i < g.rows(); ++i)
    for (Index j = 0; j < g.cols(); ++j) {
      out += g(i, j) ? '1' : '0';
      out += j + 1 < g.cols() ? ' ' : '\n';
    }
  return out;
}

}  // namespace io_detail

inline LabelMatrix load_labels(const std::string& path) {
  auto [shape, bits] = io_detail::parse_bits(io_detail::read_file(path));
  return LabelMatrix(shape[0], shape[1], std::move(bits));
}

inline PredictionMatrix load_predictions(const std::string& path) {
  auto [shape, bits] = io_detail::parse_bits(io_detail::read_file(path));
  return PredictionMatrix(shape[0], shape[1], std::move(bits));
}

inline void save_binary(const std::string& path, const detail::BitGrid& g) {
  io_detail::write_file(path, io_detail::format_bits(g));
}

}  // namespace limo

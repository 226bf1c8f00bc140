#include "stochopt/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "stochopt/errors.hpp"
#include "stochopt/metrics.hpp"

namespace stochopt {

namespace {

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::optional<double> to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::size_t> to_index(std::string_view s) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::string_view source, std::optional<std::size_t> dim) {
  std::vector<Eigen::Triplet<double>> entries;
  std::vector<double> labels;
  std::size_t max_index = 0;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    std::istringstream tokens{std::string(line)};
    std::string tok;
    tokens >> tok;
    const auto label = to_double(tok);
    if (!label) fail(source, lineno, "bad label '" + tok + "'");
    const auto row = static_cast<int>(labels.size());
    labels.push_back(*label);

    std::size_t prev = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) fail(source, lineno, "expected index:value, got '" + tok + "'");
      const auto index = to_index(std::string_view(tok).substr(0, colon));
      const auto value = to_double(std::string_view(tok).substr(colon + 1));
      if (!index || *index == 0) fail(source, lineno, "bad feature index in '" + tok + "'");
      if (!value) fail(source, lineno, "bad feature value in '" + tok + "'");
      if (*index <= prev) fail(source, lineno, "feature indices must increase");
      if (dim && *index > *dim) fail(source, lineno, "feature index exceeds dimension");
      prev = *index;
      max_index = std::max(max_index, *index);
      entries.emplace_back(row, static_cast<int>(*index - 1), *value);
    }
  }
  if (labels.empty()) throw DataError(std::string(source) + ": no samples");
  const std::size_t n = dim ? *dim : max_index;
  if (n == 0) throw DataError(std::string(source) + ": no features");

  SparseRows features(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(n));
  features.setFromTriplets(entries.begin(), entries.end());
  Vec y = Eigen::Map<Vec>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  try {
    return Dataset::from_sparse(std::move(features), std::move(y));
  } catch (const std::exception& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
}

Dataset load_libsvm(const std::filesystem::path& path, std::optional<std::size_t> dim) {
  auto in = open_in(path);
  return parse_libsvm(in, path.string(), dim);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << format_double(data.label(i));
    for (const auto& [j, v] : data.row_entries(i)) out << ' ' << (j + 1) << ':' << format_double(v);
    out << '\n';
  }
}

void write_libsvm(const std::filesystem::path& path, const Dataset& data) {
  auto out = open_out(path);
  write_libsvm(out, data);
}

Dataset parse_csv(std::istream& in, std::string_view source, std::size_t label_column,
                  bool has_header) {
  std::vector<std::vector<double>> rows;
  std::string raw;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (has_header && lineno == 1) continue;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    for (std::size_t col = 1;; ++col) {
      const auto comma = line.find(',', start);
      const auto cell = trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
      const auto v = to_double(cell);
      if (!v) {
        fail(source, lineno, "column " + std::to_string(col) + ": not a number '" + std::string(cell) + "'");
      }
      row.push_back(*v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows.empty()) {
      width = row.size();
      if (label_column >= width) fail(source, lineno, "label column out of range");
      if (width < 2) fail(source, lineno, "need a label and at least one feature");
    } else if (row.size() != width) {
      fail(source, lineno, "expected " + std::to_string(width) + " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(std::string(source) + ": no samples");

  DenseRows features(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  Vec labels(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Eigen::Index f = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_column) labels[static_cast<Eigen::Index>(i)] = rows[i][c];
      else features(static_cast<Eigen::Index>(i), f++) = rows[i][c];
    }
  }
  try {
    return Dataset::from_dense(std::move(features), std::move(labels));
  } catch (const std::exception& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
}

Dataset load_csv(const std::filesystem::path& path, std::size_t label_column, bool has_header) {
  auto in = open_in(path);
  return parse_csv(in, path.string(), label_column, has_header);
}

void write_csv(std::ostream& out, const Dataset& data, std::size_t label_column, bool header) {
  const std::size_t width = data.dim() + 1;
  if (label_column >= width) throw std::invalid_argument("label column out of range");
  if (header) {
    std::size_t f = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c) out << ',';
      if (c == label_column) out << "label";
      else out << 'x' << ++f;
    }
    out << '\n';
  }
  const DenseRows dense = data.to_dense();
  for (std::size_t i = 0; i < data.size(); ++i) {
    Eigen::Index f = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c) out << ',';
      if (c == label_column) out << format_double(data.label(i));
      else out << format_double(dense(static_cast<Eigen::Index>(i), f++));
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& data, std::size_t label_column,
               bool header) {
  auto out = open_out(path);
  write_csv(out, data, label_column, header);
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha1_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw std::runtime_error("SHA-1 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string git_blob_hash(std::string_view bytes) {
  std::string blob = "blob " + std::to_string(bytes.size());
  blob.push_back('\0');
  blob.append(bytes);
  return sha1_hex(blob);
}

}  // namespace stochopt

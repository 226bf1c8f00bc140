#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "stochopt/dataset.hpp"

namespace stochopt {

// LIBSVM text: "<label> <index>:<value> ..." with 1-based, strictly
// increasing indices; blank lines and '#' comments are skipped. The
// dimension is the largest index seen unless `dim` is given.
Dataset parse_libsvm(std::istream& in, std::string_view source_name,
                     std::optional<std::size_t> dim = std::nullopt);
Dataset load_libsvm(const std::filesystem::path& path,
                    std::optional<std::size_t> dim = std::nullopt);
void write_libsvm(std::ostream& out, const Dataset& data);
void write_libsvm(const std::filesystem::path& path, const Dataset& data);

// Comma-separated numeric rows; one column (0-based `label_column`) holds the
// label, the rest are dense features.
Dataset parse_csv(std::istream& in, std::string_view source_name, std::size_t label_column,
                  bool has_header);
Dataset load_csv(const std::filesystem::path& path, std::size_t label_column, bool has_header);
void write_csv(std::ostream& out, const Dataset& data, std::size_t label_column, bool header);
void write_csv(const std::filesystem::path& path, const Dataset& data, std::size_t label_column,
               bool header);

std::string read_file(const std::filesystem::path& path);

// Lowercase hex SHA-1 of `bytes`.
std::string sha1_hex(std::string_view bytes);
// SHA-1 of "blob <size>\0" + bytes, as git computes object ids.
std::string git_blob_hash(std::string_view bytes);

}  // namespace stochopt

#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcpd {

// Reads one CSV record (RFC 4180 quoting, quoted fields may span lines).
// Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields);

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_integer(std::string_view s);

// Numeric CSV without header; every row must have the same width.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace pcpd

#pragma once

#include "mkkc/core.hpp"
#include "mkkc/rounding.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mkkc::io {

/// Malformed file contents; the message carries "path:line:".
class ParseError : public InputError {
public:
  using InputError::InputError;
};

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Numeric CSV, rows = samples. A first row that does not parse as numbers is
/// treated as a header. Rows must all have the same number of fields.
MatrixXd parse_matrix_csv(std::string_view text, const std::string& source = "<csv>");
MatrixXd read_matrix_csv(const std::filesystem::path& path);

std::string format_matrix_csv(const MatrixXd& X, const std::vector<std::string>& header = {});

/// "sample,label" rows with an optional header, or a single label column.
/// Labels must be nonnegative integers; k is one past the largest label.
HardAssignment parse_labels_csv(std::string_view text, const std::string& source = "<csv>");
HardAssignment read_labels_csv(const std::filesystem::path& path);

std::string format_labels_csv(const HardAssignment& labels);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and renames, so readers never see a partial file.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace mkkc::io

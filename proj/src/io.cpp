#include "mkkc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace mkkc::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_number(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

struct Row {
  std::size_t line;
  std::vector<std::string_view> fields;
};

/// Non-blank lines split into fields, with 1-based line numbers.
std::vector<Row> split_rows(std::string_view text) {
  std::vector<Row> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
    ++line_no;
    if (!trim(line).empty()) rows.push_back({line_no, split_fields(line)});
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return rows;
}

bool all_numeric(const Row& row) {
  double tmp = 0.0;
  return std::all_of(row.fields.begin(), row.fields.end(),
                     [&](std::string_view f) { return parse_number(f, tmp); });
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

MatrixXd parse_matrix_csv(std::string_view text, const std::string& source) {
  std::vector<Row> rows = split_rows(text);
  if (!rows.empty() && !all_numeric(rows.front())) rows.erase(rows.begin());
  if (rows.empty()) throw ParseError(source + ": no data rows");

  const std::size_t cols = rows.front().fields.size();
  MatrixXd X(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    if (row.fields.size() != cols)
      fail(source, row.line, "expected " + std::to_string(cols) + " fields, found " + std::to_string(row.fields.size()));
    for (std::size_t j = 0; j < cols; ++j) {
      double value = 0.0;
      if (!parse_number(row.fields[j], value))
        fail(source, row.line, "field " + std::to_string(j + 1) + " is not a number: '" + std::string(row.fields[j]) + "'");
      if (!std::isfinite(value)) fail(source, row.line, "field " + std::to_string(j + 1) + " is not finite");
      X(static_cast<Index>(i), static_cast<Index>(j)) = value;
    }
  }
  return X;
}

MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  return parse_matrix_csv(read_text_file(path), path.string());
}

std::string format_matrix_csv(const MatrixXd& X, const std::vector<std::string>& header) {
  std::string out;
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) out += (j ? "," : "") + header[j];
    out += '\n';
  }
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < X.cols(); ++j) {
      if (j) out += ',';
      out += format_double(X(i, j));
    }
    out += '\n';
  }
  return out;
}

HardAssignment parse_labels_csv(std::string_view text, const std::string& source) {
  std::vector<Row> rows = split_rows(text);
  if (!rows.empty() && !all_numeric(rows.front())) rows.erase(rows.begin());
  if (rows.empty()) throw ParseError(source + ": no label rows");

  HardAssignment out;
  for (const Row& row : rows) {
    if (row.fields.size() != 1 && row.fields.size() != 2)
      fail(source, row.line, "expected 'sample,label' or a single label column");
    double value = 0.0;
    if (!parse_number(row.fields.back(), value) || value < 0 || value != std::floor(value))
      fail(source, row.line, "label is not a nonnegative integer: '" + std::string(row.fields.back()) + "'");
    out.labels.push_back(static_cast<int>(value));
    out.k = std::max(out.k, static_cast<int>(value) + 1);
  }
  return out;
}

HardAssignment read_labels_csv(const std::filesystem::path& path) {
  return parse_labels_csv(read_text_file(path), path.string());
}

std::string format_labels_csv(const HardAssignment& labels) {
  std::string out = "sample,label\n";
  for (std::size_t i = 0; i < labels.labels.size(); ++i)
    out += std::to_string(i) + "," + std::to_string(labels.labels[i]) + "\n";
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mkkc::io

// SPDX-License-Identifier: Apache-2.0
#include "lazycell/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "lazycell/error.hpp"

namespace lazycell::csv {

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

void Writer::header(const std::vector<std::string>& columns) {
  for (const auto& c : columns) cell(std::string_view(c));
  end_row();
}

Writer& Writer::cell(double value) { return cell(std::string_view(format_double(value))); }

Writer& Writer::cell(long long value) { return cell(std::string_view(std::to_string(value))); }

Writer& Writer::cell(std::string_view value) {
  if (!first_) out_ << ',';
  out_ << value;
  first_ = false;
  return *this;
}

void Writer::end_row() {
  out_ << '\n';
  first_ = true;
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& values) {
  values.clear();
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    if (first == std::string::npos) return false;
    const char* begin = field.data() + first;
    const char* end = field.data() + last + 1;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) return false;
    values.push_back(v);
  }
  return true;
}

}  // namespace

PositionTable read_positions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
  std::vector<double> flat, values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!parse_row(line, values) || values.size() != 3) {
      if (line_no == 1) continue;
      throw Error(ErrorCode::ParseError,
                  fmt::format("{}:{}: expected three numbers x,y,z", path.string(), line_no));
    }
    flat.insert(flat.end(), values.begin(), values.end());
  }
  PositionTable table(Index(flat.size() / 3), 3);
  for (Index i = 0; i < table.rows(); ++i) {
    for (Index c = 0; c < 3; ++c) table(i, c) = flat[std::size_t(3 * i + c)];
  }
  return table;
}

}  // namespace lazycell::csv

// SPDX-License-Identifier: Apache-2.0
#pragma once

// Minimal CSV plumbing: header row, comma separated, doubles at 17 significant digits.

#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lazycell/types.hpp"

namespace lazycell::csv {

/// %.17g, enough digits to round-trip any double.
std::string format_double(double value);

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& columns);
  Writer& cell(double value);
  Writer& cell(long long value);
  Writer& cell(std::string_view value);
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

/// Reads x,y,z rows. A first line that does not parse as numbers is taken as a header.
PositionTable read_positions(const std::filesystem::path& path);

}  // namespace lazycell::csv

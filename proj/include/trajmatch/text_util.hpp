#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trajmatch {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

/// Splits one CSV record on commas; a trailing '\r' is dropped. Fields are
/// not quoted in any of the formats this tool reads or writes.
std::vector<std::string_view> split_csv_line(std::string_view line);

std::vector<std::string> split_list(std::string_view text, char sep = ',');

} // namespace trajmatch

#ifndef CROPML_CSV_HPP
#define CROPML_CSV_HPP

#include <optional>
#include <string>
#include <vector>

namespace cropml::csv {

// Splits one CSV line into fields. Double-quoted fields may contain commas
// and doubled quotes; a trailing '\r' is stripped first.
std::vector<std::string> split_line(const std::string& line);

// Strict locale-independent numeric parses. The whole (trimmed) field must
// be consumed; "nan"/"inf" parse as their IEEE values and are left for the
// cleaning pass to reject.
std::optional<double> parse_double(const std::string& field);
std::optional<long long> parse_int(const std::string& field);

// Shortest decimal text that round-trips the value (std::to_chars).
// NaN renders as "nan", infinities as "inf"/"-inf".
std::string format_double(double v);

// Quotes a field if it contains a comma, quote or newline.
std::string quote_field(const std::string& field);

std::string join_row(const std::vector<std::string>& fields);

} // namespace cropml::csv

#endif

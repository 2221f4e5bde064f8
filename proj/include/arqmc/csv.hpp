#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace arqmc {

// RFC 4180: fields with comma, quote, CR or LF are quoted; quotes doubled.
std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Parses a whole RFC 4180 document (CRLF or LF line ends).
std::vector<std::vector<std::string>> read_csv(std::istream& in);

}  // namespace arqmc

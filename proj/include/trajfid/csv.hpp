#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace trajfid {

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view value);

// RFC 4180 reader: quoted fields, doubled quotes, LF or CRLF records.
// A trailing newline does not produce an empty record. Throws ParseError on an
// unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace trajfid

#pragma once

// Canonical JSON serialization for every artifact the engine writes: object
// keys sorted, doubles printed with 9 significant digits ("%.9g"), integers
// verbatim, no insignificant whitespace, newline-terminated. Golden-file and
// byte-identity tests depend on this form, so it never changes casually.

#include <string>

#include <nlohmann/json.hpp>

namespace fyi {

using json = nlohmann::json;

std::string format_double(double value); // "%.9g", with "-0" folded to "0"

// Serialize without the trailing newline.
std::string canonical_dump(const json& value);

// canonical_dump + '\n'; the form used for files on disk.
std::string canonical_bytes(const json& value);

} // namespace fyi

#pragma once

#include <string>

namespace kgnr {

// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

// Current wall-clock time as an ISO 8601 UTC stamp, e.g. 2025-03-01T12:34:56Z.
std::string iso8601_now();

// Writes content verbatim; creates parent directories. Throws ValidationError
// on I/O failure.
void write_text_file(const std::string& path, const std::string& content);

} // namespace kgnr

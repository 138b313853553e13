#pragma once

#include <string>
#include <vector>

namespace kgnr {

// Report table in the harness CSV dialect: a fixed header row, data rows,
// and optional trailing '# ...' note lines. Every file starts with
// '# generated <ISO8601>'; that stamp is the only nondeterministic byte in a
// run, so reports from identical specs are byte-identical below line one.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows; // each sized like columns
    std::vector<std::string> notes;
};

// The shared report schema.
extern const std::vector<std::string> kReportColumns;

// Deterministic rendering with the caller's timestamp (tests pin it).
// Throws ValidationError when a row width disagrees with the header.
std::string render_csv(const CsvTable& table, const std::string& timestamp);

// render_csv stamped with the current time, written via write_text_file.
void write_csv(const std::string& path, const CsvTable& table);

} // namespace kgnr

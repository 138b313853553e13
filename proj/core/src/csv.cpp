#include "kgnr/csv.hpp"

#include <sstream>

#include "kgnr/errors.hpp"
#include "kgnr/textio.hpp"

namespace kgnr {

const std::vector<std::string> kReportColumns = {
    "eps",      "time",     "order_k",            "norm_s", "error",
    "leading_error", "residual", "self_conv_residual", "flags"};

std::string render_csv(const CsvTable& table, const std::string& timestamp) {
    std::ostringstream out;
    out << "# generated " << timestamp << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) {
            throw ValidationError("csv row has " + std::to_string(row.size()) +
                                  " cells, header has " + std::to_string(table.columns.size()));
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    for (const auto& note : table.notes) {
        out << "# " << note << '\n';
    }
    return out.str();
}

void write_csv(const std::string& path, const CsvTable& table) {
    write_text_file(path, render_csv(table, iso8601_now()));
}

} // namespace kgnr

#include "skinsim/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace skinsim {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else if (ch != '\r') {
            current.push_back(ch);
        }
    }
    fields.push_back(current);
    return fields;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& field, const std::filesystem::path& path,
                    std::size_t line_no) {
    const std::string t = trimmed(field);
    double value = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || t.empty()) {
        std::ostringstream msg;
        msg << path.string() << ":" << line_no << ": not a number: '" << field
            << "'";
        throw DataError(msg.str());
    }
    return value;
}

} // namespace

CsvTable read_csv(const std::filesystem::path& path,
                  const std::vector<std::string>& expected_header) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) {
            continue;
        }
        const std::vector<std::string> fields = split_fields(line);
        if (line_no == 1) {
            for (const std::string& f : fields) {
                table.header.push_back(trimmed(f));
            }
            if (table.header != expected_header) {
                std::ostringstream expected;
                for (std::size_t i = 0; i < expected_header.size(); ++i) {
                    expected << (i ? "," : "") << expected_header[i];
                }
                throw DataError(path.string() + ":1: expected header '" +
                                expected.str() + "'");
            }
            continue;
        }
        if (fields.size() != expected_header.size()) {
            std::ostringstream msg;
            msg << path.string() << ":" << line_no << ": expected "
                << expected_header.size() << " fields, got " << fields.size();
            throw DataError(msg.str());
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) {
            row.push_back(parse_number(f, path, line_no));
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) {
        throw DataError(path.string() + ": empty file");
    }
    return table;
}

SampleSet read_sample_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path, {"x", "c"});
    SampleSet samples;
    samples.source = path.string();
    samples.x.reserve(table.rows.size());
    samples.c_pf.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        samples.x.push_back(row[0]);
        samples.c_pf.push_back(row[1]);
    }
    return samples;
}

std::vector<PressReleaseTrace> read_cycles_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path, {"t", "c", "f"});
    if (table.rows.empty()) {
        throw DataError(path.string() + ": no data rows");
    }
    std::vector<PressReleaseTrace> cycles;
    PressReleaseTrace current;
    double last_t = -std::numeric_limits<double>::infinity();
    for (const auto& row : table.rows) {
        if (row[0] < last_t && !current.t_s.empty()) {
            cycles.push_back(std::move(current));
            current = PressReleaseTrace{};
        }
        last_t = row[0];
        current.t_s.push_back(row[0]);
        current.c_pf.push_back(row[1]);
        current.f_n.push_back(row[2]);
    }
    if (!current.t_s.empty()) {
        cycles.push_back(std::move(current));
    }
    return cycles;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    out.precision(17);
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << header[i];
    }
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << row[i];
        }
        out << "\n";
    }
}

} // namespace skinsim

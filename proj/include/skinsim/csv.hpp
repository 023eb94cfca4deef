#pragma once

// Strict CSV ingestion: UTF-8, '.' decimal separator, one record per line,
// exact headers. Parse failures name the offending line.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "skinsim/calib.hpp"

namespace skinsim {

// Malformed input data (CSV rows, non-invertible traces). Maps to exit
// code 3 in the CLI.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Reads a numeric CSV and checks the header matches exactly.
CsvTable read_csv(const std::filesystem::path& path,
                  const std::vector<std::string>& expected_header);

// Header `x,c`.
SampleSet read_sample_csv(const std::filesystem::path& path);

// Header `t,c,f`; a drop in t starts a new press-release cycle.
std::vector<PressReleaseTrace> read_cycles_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

} // namespace skinsim

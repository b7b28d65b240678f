#pragma once

#include "zeronoise/density.hpp"
#include "zeronoise/operators.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace zeronoise {

/// 17 significant digits, round-trip exact.
std::string format_number(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> lines;  ///< 1-based source line of each row
};

/// Comma-separated, no quoting. Blank lines and lines starting with '#' are
/// skipped. With has_header the first remaining line becomes the header.
CsvTable read_csv(const std::filesystem::path& path, bool has_header = true);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// (x, value) rows: bin centers for bins, `samples` uniform points for
/// Fourier densities (0 picks 4 (2N + 1)).
void write_density_csv(const std::filesystem::path& path, const DensityGrid& g, int samples = 0);

/// Nonzero entries as (row, col, value) for Ulam or (k, m, re, im) for Fourier.
void write_operator_csv(const std::filesystem::path& path, const TransferMatrix& op);

}  // namespace zeronoise

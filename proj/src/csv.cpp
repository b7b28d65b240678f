#include "zeronoise/csv.hpp"

#include "zeronoise/errors.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <fstream>
#include <sstream>

namespace zeronoise {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    return out;
}

}  // namespace

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

CsvTable read_csv(const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw ValidationError(fmt::format("cannot read {}", path.string()));
    CsvTable table;
    std::string line;
    int number = 0;
    bool header_done = !has_header;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!header_done) {
            table.header = split(t);
            header_done = true;
            continue;
        }
        table.rows.push_back(split(t));
        table.lines.push_back(number);
    }
    return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out = open_output(path);
    out << fmt::format("{}\n", fmt::join(header, ","));
    for (const auto& row : rows) out << fmt::format("{}\n", fmt::join(row, ","));
}

void write_density_csv(const std::filesystem::path& path, const DensityGrid& g, int samples) {
    std::vector<std::vector<std::string>> rows;
    if (const auto* b = std::get_if<BinDensity>(&g)) {
        for (int i = 0; i < b->size(); ++i) {
            rows.push_back({format_number(b->center(i)), format_number((*b)[i])});
        }
    } else {
        const auto& f = std::get<FourierDensity>(g);
        if (samples <= 0) samples = 4 * (2 * f.modes() + 1);
        const auto values = f.sample(samples);
        for (int j = 0; j < samples; ++j) {
            rows.push_back({format_number(static_cast<double>(j) / samples),
                            format_number(values[static_cast<std::size_t>(j)])});
        }
    }
    write_csv(path, {"x", "value"}, rows);
}

void write_operator_csv(const std::filesystem::path& path, const TransferMatrix& op) {
    std::vector<std::vector<std::string>> rows;
    if (op.backend() == Backend::ulam) {
        const Eigen::MatrixXd m = op.ulam().dense();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                if (m(i, j) != 0.0) {
                    rows.push_back({std::to_string(i), std::to_string(j), format_number(m(i, j))});
                }
            }
        }
        write_csv(path, {"row", "col", "value"}, rows);
        return;
    }
    const FourierOperator& f = op.fourier();
    for (int k = -f.modes(); k <= f.modes(); ++k) {
        for (int m = -f.modes(); m <= f.modes(); ++m) {
            const auto v = f.entry(k, m);
            if (v != 0.0) {
                rows.push_back({std::to_string(k), std::to_string(m), format_number(v.real()),
                                format_number(v.imag())});
            }
        }
    }
    write_csv(path, {"k", "m", "re", "im"}, rows);
}

}  // namespace zeronoise

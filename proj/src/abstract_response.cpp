#include "zeronoise/abstract_response.hpp"

#include "zeronoise/csv.hpp"
#include "zeronoise/errors.hpp"
#include "zeronoise/solver.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace zeronoise {

namespace {

double l1(const Eigen::VectorXd& v) { return v.cwiseAbs().sum(); }

void check_delta(const MarkovFamily& family, double delta) {
    if (!(delta > 0.0 && delta <= family.delta_max)) {
        throw ValidationError(
            fmt::format("delta {} outside (0, {}]", delta, family.delta_max));
    }
}

}  // namespace

MarkovFamily make_family(Eigen::MatrixXd L0, Eigen::MatrixXd A, Eigen::MatrixXd B,
                         double delta_max) {
    const Eigen::Index d = L0.rows();
    if (d < 2 || L0.cols() != d || A.rows() != d || A.cols() != d || B.rows() != d ||
        B.cols() != d) {
        throw ValidationError("Markov family matrices must be square of equal size >= 2");
    }
    if (!(delta_max > 0.0)) throw ValidationError("delta_max must be positive");
    for (Eigen::Index j = 0; j < d; ++j) {
        if (std::abs(L0.col(j).sum() - 1.0) > 1e-12 || L0.col(j).minCoeff() < 0.0) {
            throw ValidationError(fmt::format("L0 column {} is not a probability vector", j));
        }
        if (std::abs(A.col(j).sum()) > 1e-12 || std::abs(B.col(j).sum()) > 1e-12) {
            throw ValidationError(fmt::format("A or B column {} does not sum to zero", j));
        }
    }
    MarkovFamily family{std::move(L0), std::move(A), std::move(B), delta_max};
    for (int i = 0; i <= 100; ++i) {
        const double delta = delta_max * i / 100.0;
        if (family.at(delta).minCoeff() < 0.0) {
            throw ValidationError(
                fmt::format("L_delta has a negative entry at delta = {}", delta));
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> eig(family.L0, false);
    std::vector<double> moduli;
    for (Eigen::Index i = 0; i < d; ++i) moduli.push_back(std::abs(eig.eigenvalues()(i)));
    std::sort(moduli.begin(), moduli.end(), std::greater<>());
    if (moduli[1] > 1.0 - 1e-8) {
        throw UnsupportedError(fmt::format(
            "L0 has second eigenvalue of modulus {}; the leading eigenvalue is not simple",
            moduli[1]));
    }
    return family;
}

MarkovFamily random_markov_family(int d, std::uint64_t seed, double delta_max) {
    if (d < 2) throw ValidationError("random_markov_family: d must be at least 2");
    std::mt19937_64 engine(seed);
    // Bits to doubles by hand so the family does not depend on the library's
    // distribution implementation.
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(engine() >> 11) * 0x1.0p-53;
    };
    Eigen::MatrixXd L0(d, d);
    Eigen::MatrixXd A(d, d);
    Eigen::MatrixXd B(d, d);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) L0(i, j) = uniform(0.2, 1.0);
        L0.col(j) /= L0.col(j).sum();
        for (int i = 0; i < d; ++i) A(i, j) = uniform(-1.0, 1.0);
        for (int i = 0; i < d; ++i) B(i, j) = uniform(-1.0, 1.0);
        A.col(j).array() -= A.col(j).mean();
        B.col(j).array() -= B.col(j).mean();
    }
    const double floor = L0.minCoeff();
    A *= 0.5 * floor / (delta_max * A.cwiseAbs().maxCoeff());
    B *= 0.25 * floor / (delta_max * delta_max * B.cwiseAbs().maxCoeff());
    return make_family(std::move(L0), std::move(A), std::move(B), delta_max);
}

MarkovFamily load_family_csv(const std::filesystem::path& path) {
    CsvTable table = read_csv(path, false);
    if (!table.rows.empty() && !table.rows.front().empty() && table.rows.front()[0] == "matrix") {
        table.rows.erase(table.rows.begin());
        table.lines.erase(table.lines.begin());
    }
    int d = 0;
    for (const auto& row : table.rows) {
        if (row.size() == 4) {
            d = std::max({d, std::stoi(row[1]) + 1, std::stoi(row[2]) + 1});
        }
    }
    if (d < 2) throw ValidationError(fmt::format("{}: no matrix entries", path.string()));
    Eigen::MatrixXd L0 = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, d);
    double delta_max = 0.0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int line = table.lines[r];
        try {
            if (row.size() == 2 && row[0] == "delta_max") {
                delta_max = std::stod(row[1]);
                continue;
            }
            if (row.size() != 4) throw ValidationError("expected name,i,j,value");
            Eigen::MatrixXd* m = row[0] == "L0" ? &L0 : row[0] == "A" ? &A : row[0] == "B" ? &B : nullptr;
            if (m == nullptr) throw ValidationError(fmt::format("unknown matrix '{}'", row[0]));
            (*m)(std::stoi(row[1]), std::stoi(row[2])) = std::stod(row[3]);
        } catch (const std::logic_error& e) {
            throw ConfigError(line, fmt::format("{}: {}", path.string(), e.what()));
        } catch (const ValidationError& e) {
            throw ConfigError(line, fmt::format("{}: {}", path.string(), e.what()));
        }
    }
    return make_family(std::move(L0), std::move(A), std::move(B), delta_max);
}

void save_family_csv(const MarkovFamily& family, const std::filesystem::path& path) {
    std::vector<std::vector<std::string>> rows;
    const int d = family.dimension();
    for (const auto& [name, m] : {std::pair<const char*, const Eigen::MatrixXd*>{"L0", &family.L0},
                                  {"A", &family.A},
                                  {"B", &family.B}}) {
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                rows.push_back({name, std::to_string(i), std::to_string(j), format_number((*m)(i, j))});
            }
        }
    }
    rows.push_back({"delta_max", format_number(family.delta_max)});
    write_csv(path, {"matrix", "row", "col", "value"}, rows);
}

ResponseCheck verify_linear_response(const MarkovFamily& family,
                                     const std::vector<double>& deltas) {
    ResponseCheck out;
    out.h0 = stationary_vector(family.L0);
    out.term = markov_resolvent(family.L0, family.A * out.h0);
    for (double delta : deltas) {
        check_delta(family, delta);
        const Eigen::VectorXd h = stationary_vector(family.at(delta));
        const double dev = l1((h - out.h0) / delta - out.term);
        out.points.push_back({delta, dev});
        out.max_deviation = std::max(out.max_deviation, dev);
    }
    return out;
}

ResponseCheck verify_quadratic_response(const MarkovFamily& family,
                                        const std::vector<double>& deltas) {
    ResponseCheck out;
    out.h0 = stationary_vector(family.L0);
    const Eigen::VectorXd linear = markov_resolvent(family.L0, family.A * out.h0);
    out.term = markov_resolvent(family.L0, family.B * out.h0 + family.A * linear);
    for (double delta : deltas) {
        check_delta(family, delta);
        const Eigen::VectorXd h = stationary_vector(family.at(delta));
        const double dev = l1((h - out.h0 - delta * linear) / (delta * delta) - out.term);
        out.points.push_back({delta, dev});
        out.max_deviation = std::max(out.max_deviation, dev);
    }
    return out;
}

}  // namespace zeronoise
